//! Removal of links, keyword lists and journal/report-number lines.

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::CorpusError;

/// Regex lists driving [`Cleaner`]. Inline patterns are deleted wherever
/// they occur; line patterns drop the whole (whitespace-normalized) line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningRules {
    pub inline: Vec<String>,
    pub lines: Vec<String>,
}

impl Default for CleaningRules {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|p| p.to_string()).collect();
        Self {
            inline: s(&[
                r"(?i)\b(?:https?|ftp)://\S+",
                r"(?i)\bwww\.\S+",
                r"(?i)\bdoi:\s*\S+",
            ]),
            lines: s(&[
                r"(?i)^(?:keywords?|key\s+words|index\s+terms)\s*[:\-—–]",
                r"(?i)^arxiv:\s*\d{4}\.\d{4,5}",
                r"(?i)^(?:vol\.|volume)\s*\d+",
                r"(?i)^(?:issn|isbn|doi)\b",
                r"(?i)^(?:report|preprint|technical report)\s+(?:no\.?|number|#)\s*\S+",
                r"^[A-Z][A-Za-z.& ]+\s\d+\s?\(\d{4}\)\s?\d+\s?[–-]\s?\d+\.?$",
            ]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cleaner {
    inline: Vec<Regex>,
    lines: Vec<Regex>,
}

impl Default for Cleaner {
    fn default() -> Self {
        Self::new(&CleaningRules::default()).expect("default cleaning rules compile")
    }
}

impl Cleaner {
    pub fn new(rules: &CleaningRules) -> Result<Self, CorpusError> {
        let compile = |kind: &str, patterns: &[String]| -> Result<Vec<Regex>, CorpusError> {
            patterns
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    Regex::new(p).map_err(|e| CorpusError::InvalidPattern {
                        name: format!("{kind}[{i}]"),
                        message: e.to_string(),
                    })
                })
                .collect()
        };
        Ok(Self {
            inline: compile("inline", &rules.inline)?,
            lines: compile("lines", &rules.lines)?,
        })
    }

    /// Cleans until a fixpoint, so `clean(clean(x)) == clean(x)`.
    pub fn clean(&self, text: &str) -> String {
        let mut current = self.pass(text);
        for _ in 0..8 {
            let next = self.pass(&current);
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    fn pass(&self, text: &str) -> String {
        let mut out: Vec<String> = Vec::new();
        let mut blank = false;
        for line in text.lines() {
            let mut line = line.to_string();
            for re in &self.inline {
                if re.is_match(&line) {
                    line = re.replace_all(&line, "").into_owned();
                }
            }
            let line = line.split_whitespace().collect::<Vec<_>>().join(" ");
            if line.is_empty() {
                blank = !out.is_empty();
                continue;
            }
            if self.lines.iter().any(|re| re.is_match(&line)) {
                continue;
            }
            if blank {
                out.push(String::new());
                blank = false;
            }
            out.push(line);
        }
        out.join("\n")
    }
}

/// [`Cleaner::clean`] with the default rules.
pub fn clean_section(text: &str) -> String {
    thread_local! {
        static DEFAULT: Cleaner = Cleaner::default();
    }
    DEFAULT.with(|c| c.clean(text))
}
