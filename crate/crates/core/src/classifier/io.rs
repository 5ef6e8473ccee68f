//! Line-oriented model file.
//!
//! ```text
//! #styleseg-logodds v1<TAB>smoothing=0.0001<TAB>words=2<TAB>human=<hex><TAB>llm=<hex>
//! because<TAB>-6.79
//! realm<TAB>6
//! ```
//!
//! Values use the shortest decimal form that parses back to the same bits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{ClassifierError, LogOddsModel};

const MAGIC: &str = "#styleseg-logodds v1";

pub fn serialize_model(model: &LogOddsModel) -> Result<String, ClassifierError> {
    let mut out = String::with_capacity(model.len() * 24 + 256);
    let _ = writeln!(
        out,
        "{MAGIC}\tsmoothing={}\twords={}\thuman={}\tllm={}",
        model.smoothing,
        model.len(),
        model.human_digest,
        model.llm_digest
    );
    for (word, value) in model.iter() {
        if word.is_empty() || word.contains(char::is_whitespace) {
            return Err(ClassifierError::UnstorableWord(word.to_string()));
        }
        let _ = writeln!(out, "{word}\t{value}");
    }
    Ok(out)
}

pub fn write_model(model: &LogOddsModel, path: &Path) -> Result<(), ClassifierError> {
    let text = serialize_model(model)?;
    std::fs::write(path, text).map_err(|e| ClassifierError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_model(path: &Path) -> Result<LogOddsModel, ClassifierError> {
    let text = std::fs::read_to_string(path).map_err(|e| ClassifierError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_model(&text)
}

fn malformed(offset: usize, message: impl Into<String>) -> ClassifierError {
    ClassifierError::MalformedModelFile {
        offset,
        message: message.into(),
    }
}

pub fn parse_model(text: &str) -> Result<LogOddsModel, ClassifierError> {
    let mut offset = 0usize;
    let mut lines = text.split_inclusive('\n');

    let header = lines.next().ok_or_else(|| malformed(0, "empty file"))?;
    if !header.ends_with('\n') {
        return Err(malformed(header.len(), "truncated header"));
    }
    let mut fields = header.trim_end_matches('\n').split('\t');
    if fields.next() != Some(MAGIC) {
        return Err(malformed(0, "missing model header"));
    }
    let mut kv: BTreeMap<&str, &str> = BTreeMap::new();
    for f in fields {
        let (k, v) = f
            .split_once('=')
            .ok_or_else(|| malformed(0, format!("bad header field `{f}`")))?;
        kv.insert(k, v);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| malformed(0, format!("header lacks `{k}`")));
    let smoothing: f64 = get("smoothing")?
        .parse()
        .map_err(|_| malformed(0, "bad smoothing value"))?;
    let words: usize = get("words")?
        .parse()
        .map_err(|_| malformed(0, "bad word count"))?;
    let human_digest = get("human")?.to_string();
    let llm_digest = get("llm")?.to_string();
    offset += header.len();

    let mut log_odds = BTreeMap::new();
    let mut previous: Option<&str> = None;
    for line in lines {
        if !line.ends_with('\n') {
            return Err(malformed(offset + line.len(), "truncated row"));
        }
        let row = line.trim_end_matches('\n');
        let (word, value) = row
            .split_once('\t')
            .ok_or_else(|| malformed(offset, "row is not `word<TAB>value`"))?;
        if word.is_empty() {
            return Err(malformed(offset, "empty word"));
        }
        if previous.is_some_and(|p| p >= word) {
            return Err(malformed(offset, "rows are not sorted by word"));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| malformed(offset + word.len() + 1, format!("bad value `{value}`")))?;
        log_odds.insert(word.to_string(), value);
        previous = Some(word);
        offset += line.len();
    }
    if log_odds.len() != words {
        return Err(malformed(
            offset,
            format!("header declares {words} words, found {}", log_odds.len()),
        ));
    }
    Ok(LogOddsModel {
        log_odds,
        smoothing,
        human_digest,
        llm_digest,
    })
}
