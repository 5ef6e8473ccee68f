//! Smoothed word log-odds classifier.
//!
//! Each document is reduced to per-word frequency rates (count / length) so
//! long documents do not dominate; rates are averaged over a corpus, and the
//! model stores `ln(llm_rate + eps) - ln(human_rate + eps)` per word.

mod io;
mod profile;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::TokenStream;

pub use io::{load_model, parse_model, serialize_model, write_model};
pub use profile::{build_profile, build_profile_with, frequency_rates, FrequencyProfile};

/// Smoothing constant added to both mean rates.
pub const DEFAULT_SMOOTHING: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifierError {
    #[error("no word tokens to score")]
    EmptyTokenStream,
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("threshold must be positive, got {0}")]
    InvalidThreshold(f64),
    #[error("smoothing must be positive and finite, got {0}")]
    InvalidSmoothing(f64),
    #[error("malformed model file at byte {offset}: {message}")]
    MalformedModelFile { offset: usize, message: String },
    #[error("word {0:?} cannot be stored in a model file")]
    UnstorableWord(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Word to log-odds map; words absent from both training corpora score 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogOddsModel {
    pub(crate) log_odds: BTreeMap<String, f64>,
    pub(crate) smoothing: f64,
    pub(crate) human_digest: String,
    pub(crate) llm_digest: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub smoothing: f64,
    /// Drop words seen in fewer documents than this (both corpora pooled).
    /// 0 or 1 keeps every word.
    pub min_doc_freq: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            smoothing: DEFAULT_SMOOTHING,
            min_doc_freq: 0,
        }
    }
}

/// Trains with the default smoothing and no vocabulary filter.
pub fn train(human: &FrequencyProfile, llm: &FrequencyProfile) -> LogOddsModel {
    train_with(human, llm, TrainOptions::default()).expect("default options are valid")
}

pub fn train_with(
    human: &FrequencyProfile,
    llm: &FrequencyProfile,
    options: TrainOptions,
) -> Result<LogOddsModel, ClassifierError> {
    let eps = options.smoothing;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(ClassifierError::InvalidSmoothing(eps));
    }
    let mut log_odds = BTreeMap::new();
    let words = human.rates().keys().chain(llm.rates().keys());
    for word in words {
        if log_odds.contains_key(word) {
            continue;
        }
        let df = human.doc_freq(word) + llm.doc_freq(word);
        if df < options.min_doc_freq {
            continue;
        }
        let l = llm.rate(word);
        let h = human.rate(word);
        // Difference of logs keeps swapping the profiles an exact negation.
        log_odds.insert(word.clone(), (l + eps).ln() - (h + eps).ln());
    }
    Ok(LogOddsModel {
        log_odds,
        smoothing: eps,
        human_digest: human.digest(),
        llm_digest: llm.digest(),
    })
}

impl LogOddsModel {
    /// Log-odds of a word; 0 when out of vocabulary.
    pub fn get(&self, word: &str) -> f64 {
        self.log_odds.get(word).copied().unwrap_or(0.0)
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn human_digest(&self) -> &str {
        &self.human_digest
    }

    pub fn llm_digest(&self) -> &str {
        &self.llm_digest
    }

    pub fn len(&self) -> usize {
        self.log_odds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_odds.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.log_odds.iter().map(|(w, v)| (w.as_str(), *v))
    }

    /// Builds a model from explicit values, e.g. for tests.
    pub fn from_map(log_odds: BTreeMap<String, f64>, smoothing: f64) -> Self {
        Self {
            log_odds,
            smoothing,
            human_digest: String::new(),
            llm_digest: String::new(),
        }
    }

    /// Largest attainable magnitude, `ln((1 + eps) / eps)`.
    pub fn bound(&self) -> f64 {
        ((1.0 + self.smoothing) / self.smoothing).ln()
    }
}

/// Per-token log-odds of one document and their running sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDocument {
    pub id: String,
    pub word_odds: Vec<f64>,
    pub cumsum: Vec<f64>,
    pub total: f64,
    pub length: usize,
}

pub fn score(
    model: &LogOddsModel,
    tokens: &TokenStream,
    id: impl Into<String>,
) -> Result<ScoredDocument, ClassifierError> {
    if tokens.is_empty() {
        return Err(ClassifierError::EmptyTokenStream);
    }
    let word_odds: Vec<f64> = tokens.iter().map(|t| model.get(t)).collect();
    let mut acc = 0.0;
    let cumsum: Vec<f64> = word_odds
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    Ok(ScoredDocument {
        id: id.into(),
        length: word_odds.len(),
        total: acc,
        word_odds,
        cumsum,
    })
}

/// Decision rule on a document total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Human,
    Llm,
}

/// `total > threshold` means LLM.
pub fn classify(total: f64, threshold: f64) -> Label {
    if total > threshold {
        Label::Llm
    } else {
        Label::Human
    }
}

/// Words beyond `±threshold`, ranked by magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopWords {
    /// `log_odds > threshold`, descending.
    pub llm: Vec<(String, f64)>,
    /// `log_odds < -threshold`, ascending.
    pub human: Vec<(String, f64)>,
}

pub fn export_top_words(model: &LogOddsModel, threshold: f64) -> Result<TopWords, ClassifierError> {
    if !(threshold > 0.0) {
        return Err(ClassifierError::InvalidThreshold(threshold));
    }
    let mut llm: Vec<(String, f64)> = model
        .iter()
        .filter(|(_, v)| *v > threshold)
        .map(|(w, v)| (w.to_string(), v))
        .collect();
    let mut human: Vec<(String, f64)> = model
        .iter()
        .filter(|(_, v)| *v < -threshold)
        .map(|(w, v)| (w.to_string(), v))
        .collect();
    // ties keep alphabetical order (stable sort over a BTreeMap walk)
    llm.sort_by(|a, b| b.1.total_cmp(&a.1));
    human.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(TopWords { llm, human })
}
