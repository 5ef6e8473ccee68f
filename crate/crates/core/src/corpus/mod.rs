//! Section extraction, cleaning and tokenization of paper texts.

mod clean;
mod sections;
mod tokenize;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use clean::{clean_section, Cleaner, CleaningRules};
pub use sections::{
    default_header_rules, detect_sections, Criteria, HeaderKind, HeaderRule, MIN_SECTION_CHARS,
};
pub use tokenize::{tokenize, tokenize_with, TokenStream, TokenizerOptions};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("missing {0} header")]
    MissingSection(Section),
    #[error("{section} section is {len} characters, below the minimum")]
    SectionTooShort { section: Section, len: usize },
    #[error("header order violation: {0}")]
    HeaderOrderViolation(String),
    #[error("no word tokens in text")]
    EmptyTokenStream,
    #[error("document `{0}` is empty")]
    EmptyDocument(String),
    #[error("no header rules given")]
    EmptyCriteria,
    #[error("invalid pattern `{name}`: {message}")]
    InvalidPattern { name: String, message: String },
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CorpusError {
    /// Short machine-readable reason, used in rejection logs.
    pub fn reason(&self) -> String {
        match self {
            CorpusError::MissingSection(s) => format!("missing_section:{s}"),
            CorpusError::SectionTooShort { section, len } => {
                format!("section_too_short:{section}:{len}")
            }
            CorpusError::HeaderOrderViolation(_) => "header_order_violation".into(),
            CorpusError::EmptyTokenStream => "empty_token_stream".into(),
            CorpusError::EmptyDocument(_) => "empty_document".into(),
            other => format!("error:{other}"),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    Abstract,
    Introduction,
    Conclusion,
    Combined,
}

impl Section {
    pub const ALL: [Section; 4] = [
        Section::Abstract,
        Section::Introduction,
        Section::Conclusion,
        Section::Combined,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Section::Abstract => "Abstract",
            Section::Introduction => "Introduction",
            Section::Conclusion => "Conclusion",
            Section::Combined => "Combined",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Abstract => "abstract",
            Section::Introduction => "introduction",
            Section::Conclusion => "conclusion",
            Section::Combined => "combined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub body: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, body: impl Into<String>) -> Result<Self, CorpusError> {
        let (id, body) = (id.into(), body.into());
        if body.trim().is_empty() {
            return Err(CorpusError::EmptyDocument(id));
        }
        Ok(Self { id, body })
    }
}

/// The three retained sections of a paper and their concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionedDocument {
    pub id: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub introduction: String,
    pub conclusion: String,
    /// `abstract + "\n" + introduction + "\n" + conclusion`.
    pub combined: String,
}

impl SectionedDocument {
    pub fn new(id: String, abstract_text: String, introduction: String, conclusion: String) -> Self {
        let combined = format!("{abstract_text}\n\n{introduction}\n\n{conclusion}");
        Self {
            id,
            abstract_text,
            introduction,
            conclusion,
            combined,
        }
    }

    pub fn section(&self, section: Section) -> &str {
        match section {
            Section::Abstract => &self.abstract_text,
            Section::Introduction => &self.introduction,
            Section::Conclusion => &self.conclusion,
            Section::Combined => &self.combined,
        }
    }

    /// Applies `cleaner` to each section and rebuilds the combined text.
    pub fn cleaned(&self, cleaner: &Cleaner) -> Self {
        Self::new(
            self.id.clone(),
            cleaner.clean(&self.abstract_text),
            cleaner.clean(&self.introduction),
            cleaner.clean(&self.conclusion),
        )
    }
}

/// Detects sections, then cleans them.
pub fn prepare_document(
    doc: &RawDocument,
    criteria: &Criteria,
    cleaner: &Cleaner,
) -> Result<SectionedDocument, CorpusError> {
    Ok(detect_sections(doc, criteria)?.cleaned(cleaner))
}

/// Lists `*.<ext>` files of a directory, sorted by file name.
pub fn list_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, CorpusError> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CorpusError::io(dir, e))? {
        let path = entry.map_err(|e| CorpusError::io(dir, e))?.path();
        let matches = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with(&format!(".{ext}")));
        if path.is_file() && matches {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Document id for a path: the file name without the given extension.
pub fn file_id(path: &Path, ext: &str) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    name.strip_suffix(&format!(".{ext}")).unwrap_or(name).to_string()
}

/// One outcome per `*.txt` file: the document, or the reason it is unusable.
pub fn load_text_dir(
    dir: &Path,
) -> Result<Vec<(String, Result<RawDocument, CorpusError>)>, CorpusError> {
    list_files(dir, "txt")?
        .into_iter()
        .map(|path| {
            let id = file_id(&path, "txt");
            let doc = std::fs::read_to_string(&path)
                .map_err(|e| CorpusError::io(&path, e))
                .and_then(|body| RawDocument::new(id.clone(), body));
            Ok((id, doc))
        })
        .collect()
}
