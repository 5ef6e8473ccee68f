//! Header detection and section extraction.

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{CorpusError, RawDocument, Section, SectionedDocument};

/// Minimum section length in characters, measured before cleaning.
pub const MIN_SECTION_CHARS: usize = 500;

/// Lines with more words than this are never headers.
const MAX_HEADER_WORDS: usize = 10;
const MAX_HEADER_CHARS: usize = 90;

/// What a matching header line opens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeaderKind {
    Abstract,
    Introduction,
    /// Conclusion, Discussion and their variants.
    Conclusion,
    /// Decide from the `title` capture group.
    Title,
    /// Any other heading; only ends the previous section.
    Other,
}

/// One header-matching rule as written in a config file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeaderRule {
    pub name: String,
    /// Regex matched against the trimmed line.
    pub pattern: String,
    pub kind: HeaderKind,
}

impl HeaderRule {
    fn new(name: &str, pattern: &str, kind: HeaderKind) -> Self {
        Self {
            name: name.to_string(),
            pattern: pattern.to_string(),
            kind,
        }
    }
}

/// The nine default rules, in priority order.
pub fn default_header_rules() -> Vec<HeaderRule> {
    use HeaderKind::*;
    vec![
        HeaderRule::new("abstract", r"^(?:Abstract|ABSTRACT)[.:]?$", Abstract),
        HeaderRule::new(
            "numbered",
            r"^\d{1,2}\.?\s+(?P<title>[A-Z][A-Za-z][A-Za-z\-&,' ]{0,70})$",
            Title,
        ),
        HeaderRule::new(
            "unnumbered",
            r"^(?P<title>Introduction|Background|Related [Ww]ork|Methods?|Methodology|Results|References|Bibliography|Acknowledge?ments?|Appendix)[.:]?$",
            Title,
        ),
        HeaderRule::new(
            "roman",
            r"^[IVX]{1,6}\.?\s+(?P<title>[A-Z][A-Za-z\-&,' ]{1,70})$",
            Title,
        ),
        HeaderRule::new("all_caps", r"^(?P<title>[A-Z][A-Z\-&,' ]{3,70})$", Title),
        HeaderRule::new(
            "conclusion",
            r"^(?:Conclusions?|Summary and Conclusions?|Conclusions? and Future Work)[.:]?$",
            Conclusion,
        ),
        HeaderRule::new(
            "discussion",
            r"^(?:Discussion|Discussion and Conclusions?)[.:]?$",
            Conclusion,
        ),
        HeaderRule::new("concluding_remarks", r"^Concluding [Rr]emarks[.:]?$", Conclusion),
        HeaderRule::new(
            "markup",
            r"^(?:\\section\*?\{|#{1,3}\s+)(?P<title>[^{}]{1,80}?)\}?$",
            Title,
        ),
    ]
}

/// Compiled, ordered header rules.
#[derive(Debug, Clone)]
pub struct Criteria {
    rules: Vec<(HeaderRule, Regex)>,
    min_section_chars: usize,
}

impl Criteria {
    pub fn new(rules: Vec<HeaderRule>) -> Result<Self, CorpusError> {
        if rules.is_empty() {
            return Err(CorpusError::EmptyCriteria);
        }
        let rules = rules
            .into_iter()
            .map(|rule| {
                Regex::new(&rule.pattern)
                    .map(|re| (rule.clone(), re))
                    .map_err(|e| CorpusError::InvalidPattern {
                        name: rule.name.clone(),
                        message: e.to_string(),
                    })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            rules,
            min_section_chars: MIN_SECTION_CHARS,
        })
    }

    pub fn with_min_section_chars(mut self, chars: usize) -> Self {
        self.min_section_chars = chars;
        self
    }

    pub fn min_section_chars(&self) -> usize {
        self.min_section_chars
    }

    pub fn rules(&self) -> impl Iterator<Item = &HeaderRule> {
        self.rules.iter().map(|(r, _)| r)
    }

    /// Classifies a line; `None` for body text.
    pub fn classify(&self, line: &str) -> Option<HeaderKind> {
        let line = line.trim();
        if line.is_empty()
            || line.chars().count() > MAX_HEADER_CHARS
            || line.split_whitespace().count() > MAX_HEADER_WORDS
        {
            return None;
        }
        self.rules.iter().find_map(|(rule, re)| {
            let caps = re.captures(line)?;
            Some(match rule.kind {
                HeaderKind::Title => caps
                    .name("title")
                    .map_or(HeaderKind::Other, |m| classify_title(m.as_str())),
                kind => kind,
            })
        })
    }
}

impl Default for Criteria {
    fn default() -> Self {
        Self::new(default_header_rules()).expect("default header rules compile")
    }
}

fn classify_title(title: &str) -> HeaderKind {
    let t = title
        .trim()
        .trim_end_matches(['.', ':'])
        .trim()
        .to_lowercase();
    if t == "abstract" {
        HeaderKind::Abstract
    } else if t.starts_with("introduction") {
        HeaderKind::Introduction
    } else if t.contains("conclusion") || t.contains("concluding") || t.contains("discussion") {
        HeaderKind::Conclusion
    } else {
        HeaderKind::Other
    }
}

/// Splits a document into its abstract, introduction and conclusion.
///
/// Section bodies run from the line after their header up to the next header
/// of any kind, and are returned uncleaned.
pub fn detect_sections(
    doc: &RawDocument,
    criteria: &Criteria,
) -> Result<SectionedDocument, CorpusError> {
    let lines: Vec<&str> = doc.body.lines().collect();
    let headers: Vec<(usize, HeaderKind)> = lines
        .iter()
        .enumerate()
        .filter_map(|(i, l)| criteria.classify(l).map(|k| (i, k)))
        .collect();

    let first_after = |kind: HeaderKind, after: Option<usize>| {
        headers
            .iter()
            .find(|(i, k)| *k == kind && after.is_none_or(|a| *i > a))
            .map(|(i, _)| *i)
    };
    let exists = |kind: HeaderKind| headers.iter().any(|(_, k)| *k == kind);

    let abs = first_after(HeaderKind::Abstract, None)
        .ok_or(CorpusError::MissingSection(Section::Abstract))?;
    let intro = match first_after(HeaderKind::Introduction, Some(abs)) {
        Some(i) => i,
        None if exists(HeaderKind::Introduction) => {
            return Err(CorpusError::HeaderOrderViolation(
                "introduction header precedes the abstract".into(),
            ))
        }
        None => return Err(CorpusError::MissingSection(Section::Introduction)),
    };
    let concl = match first_after(HeaderKind::Conclusion, Some(intro)) {
        Some(i) => i,
        None if exists(HeaderKind::Conclusion) => {
            return Err(CorpusError::HeaderOrderViolation(
                "conclusion header precedes the introduction".into(),
            ))
        }
        None => return Err(CorpusError::MissingSection(Section::Conclusion)),
    };

    let body = |start: usize| -> String {
        let end = headers
            .iter()
            .map(|(i, _)| *i)
            .find(|&i| i > start)
            .unwrap_or(lines.len());
        lines[start + 1..end].join("\n").trim().to_string()
    };

    let abstract_text = body(abs);
    let introduction = body(intro);
    let conclusion = body(concl);
    for (section, text) in [
        (Section::Abstract, &abstract_text),
        (Section::Introduction, &introduction),
        (Section::Conclusion, &conclusion),
    ] {
        let len = text.chars().count();
        if len < criteria.min_section_chars {
            return Err(CorpusError::SectionTooShort { section, len });
        }
    }
    Ok(SectionedDocument::new(
        doc.id.clone(),
        abstract_text,
        introduction,
        conclusion,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filler(n: usize) -> String {
        let base = "We examine how the method behaves on held out documents and report the outcome. ";
        base.repeat(n / base.len() + 1)[..n - 1].to_string() + "x"
    }

    fn doc(body: String) -> RawDocument {
        RawDocument::new("d", body).unwrap()
    }

    #[test]
    fn accepts_well_formed_document() {
        let (a, i, c) = (filler(600), filler(900), filler(700));
        let body = format!("Abstract\n{a}\n1 Introduction\n{i}\n5 Conclusion\n{c}");
        let s = detect_sections(&doc(body), &Criteria::default()).unwrap();
        assert_eq!(s.abstract_text, a);
        assert_eq!(s.introduction, i);
        assert_eq!(s.conclusion, c);
        assert_eq!(s.combined, format!("{a}\n\n{i}\n\n{c}"));
    }

    #[test]
    fn missing_conclusion() {
        let body = format!("Abstract\n{}\n1 Introduction\n{}", filler(600), filler(900));
        assert_eq!(
            detect_sections(&doc(body), &Criteria::default()).unwrap_err(),
            CorpusError::MissingSection(Section::Conclusion)
        );
    }

    #[test]
    fn short_abstract() {
        let body = format!(
            "Abstract\n{}\n1 Introduction\n{}\n5 Conclusion\n{}",
            filler(400),
            filler(900),
            filler(700)
        );
        assert_eq!(
            detect_sections(&doc(body), &Criteria::default()).unwrap_err(),
            CorpusError::SectionTooShort {
                section: Section::Abstract,
                len: 400
            }
        );
    }

    #[test]
    fn conclusion_before_introduction() {
        let body = format!(
            "Abstract\n{}\nConclusion\n{}\nIntroduction\n{}",
            filler(600),
            filler(600),
            filler(600)
        );
        assert!(matches!(
            detect_sections(&doc(body), &Criteria::default()),
            Err(CorpusError::HeaderOrderViolation(_))
        ));
    }

    #[test]
    fn section_ends_at_next_heading() {
        let body = format!(
            "ABSTRACT\n{}\nI. INTRODUCTION\n{}\nII. RELATED WORK\nnot part of intro\nDiscussion\n{}\nReferences\n[1] A. Author.",
            filler(600),
            filler(600),
            filler(600)
        );
        let s = detect_sections(&doc(body), &Criteria::default()).unwrap();
        assert!(!s.introduction.contains("not part of intro"));
        assert!(!s.conclusion.contains("A. Author"));
    }

    #[test]
    fn rule_variants() {
        let c = Criteria::default();
        assert_eq!(c.classify("Abstract"), Some(HeaderKind::Abstract));
        assert_eq!(c.classify("2. Introduction"), Some(HeaderKind::Introduction));
        assert_eq!(c.classify("IV. CONCLUSIONS"), Some(HeaderKind::Conclusion));
        assert_eq!(c.classify("INTRODUCTION"), Some(HeaderKind::Introduction));
        assert_eq!(c.classify("Concluding remarks"), Some(HeaderKind::Conclusion));
        assert_eq!(c.classify("\\section{Introduction}"), Some(HeaderKind::Introduction));
        assert_eq!(c.classify("## Discussion"), Some(HeaderKind::Conclusion));
        assert_eq!(c.classify("3 Experimental Setup"), Some(HeaderKind::Other));
        assert_eq!(c.classify("The results are shown in the table below and discussed."), None);
    }

    #[test]
    fn bad_pattern_is_reported() {
        let err = Criteria::new(vec![HeaderRule::new("broken", "(", HeaderKind::Other)]).unwrap_err();
        assert!(matches!(err, CorpusError::InvalidPattern { .. }));
        assert_eq!(Criteria::new(vec![]).unwrap_err(), CorpusError::EmptyCriteria);
    }
}
