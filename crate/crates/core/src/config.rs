//! Run configuration, read from TOML and overridable key by key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::changepoint::{CostModel, LengthScheme, Signal, DEFAULT_MARGIN};
use crate::classifier::DEFAULT_SMOOTHING;
use crate::corpus::{
    default_header_rules, CleaningRules, Criteria, CorpusError, HeaderRule, TokenizerOptions,
    MIN_SECTION_CHARS,
};
use crate::regen::{ProviderConfig, DEFAULT_TARGET_FRACTION};
use crate::stats::{BinStrategy, TTestKind, DEFAULT_BINS};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("bad override `{0}`: expected key=value")]
    BadOverride(String),
    #[error("override `{key}`: {message}")]
    Override { key: String, message: String },
}

/// Input locations; subcommand arguments take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Raw `*.txt` papers for `prepare`.
    pub input: Option<PathBuf>,
    /// Prepared corpus (output of `prepare`) for `segment` and `validate`.
    pub corpus: Option<PathBuf>,
    pub human: Option<PathBuf>,
    pub llm: Option<PathBuf>,
    pub model: Option<PathBuf>,
    /// Per-document CSV for `analyze`.
    pub scores: Option<PathBuf>,
    /// Per-section CSV for the section matrix in `analyze`.
    pub section_scores: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub min_section_chars: usize,
    pub header_rules: Vec<HeaderRule>,
    pub cleaning: CleaningRules,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            min_section_chars: MIN_SECTION_CHARS,
            header_rules: default_header_rules(),
            cleaning: CleaningRules::default(),
        }
    }
}

impl CorpusConfig {
    pub fn criteria(&self) -> Result<Criteria, CorpusError> {
        Ok(Criteria::new(self.header_rules.clone())?.with_min_section_chars(self.min_section_chars))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub smoothing: f64,
    pub min_doc_freq: usize,
    /// Magnitude cut for the exported top-word lists.
    pub top_words_threshold: f64,
    /// Decision threshold on document totals for confusion tables.
    pub decision_threshold: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            smoothing: DEFAULT_SMOOTHING,
            min_doc_freq: 0,
            top_words_threshold: 1.0,
            decision_threshold: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChangepointConfig {
    pub cost_model: CostModel,
    pub min_segment_length: usize,
    pub margin: f64,
    pub signal: Signal,
    /// Write `<id>.series.csv` per document.
    pub write_series: bool,
}

impl Default for ChangepointConfig {
    fn default() -> Self {
        Self {
            cost_model: CostModel::default(),
            min_segment_length: 2,
            margin: DEFAULT_MARGIN,
            signal: Signal::default(),
            write_series: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsConfig {
    pub bins: usize,
    pub bin_strategy: BinStrategy,
    pub ttest: TTestKind,
    pub length_scheme: LengthScheme,
}

impl Default for StatsConfig {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            bin_strategy: BinStrategy::default(),
            ttest: TTestKind::default(),
            length_scheme: LengthScheme::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub target_fraction: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            target_fraction: DEFAULT_TARGET_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Source of every random draw in a run.
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub paths: Paths,
    pub corpus: CorpusConfig,
    pub tokenizer: TokenizerOptions,
    pub classifier: ClassifierConfig,
    pub changepoint: ChangepointConfig,
    pub stats: StatsConfig,
    pub provider: ProviderConfig,
    pub validate: ValidateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            workers: 4,
            out: PathBuf::from("out"),
            paths: Paths::default(),
            corpus: CorpusConfig::default(),
            tokenizer: TokenizerOptions::default(),
            classifier: ClassifierConfig::default(),
            changepoint: ChangepointConfig::default(),
            stats: StatsConfig::default(),
            provider: ProviderConfig::default(),
            validate: ValidateConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    /// Sets a dotted key such as `changepoint.margin`. The value is read as a
    /// TOML literal, falling back to a plain string.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let err = |message: String| ConfigError::Override {
            key: key.to_string(),
            message,
        };
        let mut doc = toml::Value::try_from(&*self).map_err(|e| err(e.to_string()))?;
        let parsed = toml::from_str::<toml::Table>(&format!("v = {value}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));

        let parts: Vec<&str> = key.split('.').collect();
        let mut node = &mut doc;
        for part in &parts[..parts.len() - 1] {
            let table = node.as_table_mut().ok_or_else(|| err(format!("`{part}` is not a section")))?;
            node = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        let last = parts[parts.len() - 1];
        let table = node
            .as_table_mut()
            .ok_or_else(|| err("parent is not a section".into()))?;
        let value = match table.get(last) {
            // keep strings strings, e.g. `--provider.model 4`
            Some(toml::Value::String(_)) if !parsed.is_str() => toml::Value::String(value.to_string()),
            Some(toml::Value::Float(_)) => match parsed {
                toml::Value::Integer(i) => toml::Value::Float(i as f64),
                other => other,
            },
            _ => parsed,
        };
        table.insert(last.to_string(), value);
        *self = doc.try_into().map_err(|e: toml::de::Error| err(e.to_string()))?;
        Ok(())
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<(), ConfigError> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| ConfigError::BadOverride(o.to_string()))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = RunConfig::from_toml("seed = 7\n[changepoint]\nsignal = \"raw\"\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.changepoint.signal, Signal::Raw);
        assert_eq!(c.stats.bins, 25);
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn overrides() {
        let mut c = RunConfig::default();
        c.apply_overrides(&[
            "changepoint.margin=0.02",
            "stats.bins = 10",
            "classifier.smoothing=1",
            "stats.ttest=student",
            "provider.model=4",
            "paths.human=corpus/h",
            "workers=2",
        ])
        .unwrap();
        assert_eq!(c.changepoint.margin, 0.02);
        assert_eq!(c.stats.bins, 10);
        assert_eq!(c.classifier.smoothing, 1.0);
        assert_eq!(c.stats.ttest, TTestKind::Student);
        assert_eq!(c.provider.model, "4");
        assert_eq!(c.paths.human, Some(PathBuf::from("corpus/h")));
        assert_eq!(c.workers, 2);
        assert!(c.set("stats.bins", "many").is_err());
        assert!(c.set("nope.key", "1").is_err());
        assert!(matches!(
            c.apply_overrides(&["seed"]),
            Err(ConfigError::BadOverride(_))
        ));
    }
}
