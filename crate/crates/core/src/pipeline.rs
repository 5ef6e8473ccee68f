//! End-to-end commands behind the `styleseg` binary.
//!
//! Every command writes into one output directory, finishes with
//! `config_snapshot.toml` and `run_manifest.json`, and sorts rows by document
//! id so reruns with the same config are byte-identical.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::changepoint::{
    normalize_thresholds, ChangepointError, Detector, Series, ThresholdResult,
};
use crate::classifier::{
    build_profile, export_top_words, load_model, score, serialize_model, train_with,
    ClassifierError, Label, LogOddsModel, ScoredDocument, TrainOptions,
};
use crate::config::{ConfigError, RunConfig};
use crate::corpus::{
    list_files, load_text_dir, prepare_document, tokenize_with, Cleaner, CorpusError,
    SectionedDocument, Section,
};
use crate::plot::{histogram_svg, scatter_svg};
use crate::regen::{
    build_provider, build_validation_sets, regenerate_corpus, sha256_hex, ManifestKind,
    RegenError, SkipRecord, ValidationOptions,
};
use crate::stats::{
    group_summaries, pearson_labeled, render_correlation_table, render_section_matrix,
    render_summary_table, render_ttest_table, section_correlation_matrix, t_test,
    zscore_by_length_bins_with, CorrelationRecord, StatsError,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{file}: missing column `{column}`")]
    Schema { file: String, column: String },
    #[error("degenerate analysis: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Regen(#[from] RegenError),
    #[error(transparent)]
    Changepoint(#[from] ChangepointError),
}

impl PipelineError {
    /// 1 for analysis-level degeneracy, 2 for usage and IO problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Degenerate(_) => 1,
            _ => 2,
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<StatsError> for PipelineError {
    fn from(e: StatsError) -> Self {
        PipelineError::Degenerate(e.to_string())
    }
}

type Result<T, E = PipelineError> = std::result::Result<T, E>;

fn sha_bytes(bytes: &[u8]) -> String {
    sha256_hex(&[bytes])
}

#[derive(Debug, Clone, Serialize)]
struct FileDigest {
    name: String,
    sha256: String,
}

#[derive(Debug, Clone, Serialize)]
struct InputDigest {
    role: String,
    name: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config_sha256: String,
    counts: &'a BTreeMap<String, usize>,
    inputs: Vec<InputDigest>,
    outputs: Vec<FileDigest>,
}

/// Collects the files a command writes so the manifest can list them.
pub struct RunWriter {
    command: &'static str,
    out: PathBuf,
    outputs: BTreeMap<String, String>,
    inputs: Vec<InputDigest>,
    counts: BTreeMap<String, usize>,
}

impl RunWriter {
    pub fn new(command: &'static str, out: &Path) -> Result<Self> {
        std::fs::create_dir_all(out).map_err(|e| PipelineError::io(out, e))?;
        Ok(Self {
            command,
            out: out.to_path_buf(),
            outputs: BTreeMap::new(),
            inputs: Vec::new(),
            counts: BTreeMap::new(),
        })
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.out.join(rel)
    }

    pub fn write(&mut self, rel: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let bytes = bytes.as_ref();
        let path = self.out.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| PipelineError::io(parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| PipelineError::io(&path, e))?;
        self.outputs.insert(rel.to_string(), sha_bytes(bytes));
        Ok(())
    }

    fn write_csv<R: AsRef<[String]>>(&mut self, rel: &str, header: &[&str], rows: &[R]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| PipelineError::Io {
            path: rel.to_string(),
            message: e.to_string(),
        };
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r.as_ref()).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| PipelineError::Io {
            path: rel.to_string(),
            message: e.to_string(),
        })?;
        self.write(rel, bytes)
    }

    pub fn input(&mut self, role: &str, name: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest {
            role: role.into(),
            name: name.into(),
            sha256: sha_bytes(bytes),
        });
    }

    pub fn count(&mut self, key: &str, n: usize) {
        self.counts.insert(key.into(), n);
    }

    /// Writes the config snapshot and the manifest.
    pub fn finish(mut self, cfg: &RunConfig) -> Result<()> {
        let snapshot = cfg.to_toml();
        self.write("config_snapshot.toml", &snapshot)?;
        self.inputs.sort_by(|a, b| (&a.role, &a.name).cmp(&(&b.role, &b.name)));
        let manifest = RunManifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            config_sha256: sha_bytes(snapshot.as_bytes()),
            counts: &self.counts,
            inputs: std::mem::take(&mut self.inputs),
            outputs: self
                .outputs
                .iter()
                .map(|(name, sha256)| FileDigest {
                    name: name.clone(),
                    sha256: sha256.clone(),
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        let path = self.out.join("run_manifest.json");
        std::fs::write(&path, json).map_err(|e| PipelineError::io(&path, e))
    }
}

fn pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map(|p| p.install(f))
        .map_err(|e| PipelineError::Usage(format!("worker pool: {e}")))
}

fn require_dir(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        Ok(())
    } else {
        Err(PipelineError::Io {
            path: dir.display().to_string(),
            message: "not a directory".into(),
        })
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// A document of a prepared corpus.
#[derive(Debug, Clone)]
pub struct CorpusDoc {
    pub id: String,
    pub text: String,
    pub sections: Option<SectionedDocument>,
}

/// Reads a corpus directory: `sections/*.sections.json` from `prepare` when
/// present, otherwise every `*.txt` file as one combined text.
pub fn load_corpus(dir: &Path, role: &str, run: Option<&mut RunWriter>) -> Result<Vec<CorpusDoc>> {
    require_dir(dir)?;
    let sections_dir = dir.join("sections");
    let mut digests = Vec::new();
    let docs = if sections_dir.is_dir() {
        let mut docs = Vec::new();
        for path in list_files(&sections_dir, "sections.json")? {
            let bytes = std::fs::read(&path).map_err(|e| PipelineError::io(&path, e))?;
            let doc: SectionedDocument =
                serde_json::from_slice(&bytes).map_err(|e| PipelineError::io(&path, e))?;
            digests.push((format!("sections/{}", file_name(&path)), bytes));
            docs.push(CorpusDoc {
                id: doc.id.clone(),
                text: doc.combined.clone(),
                sections: Some(doc),
            });
        }
        docs
    } else {
        let mut docs = Vec::new();
        for (id, doc) in load_text_dir(dir)? {
            let doc = doc?;
            digests.push((format!("{id}.txt"), doc.body.clone().into_bytes()));
            docs.push(CorpusDoc {
                id,
                text: doc.body,
                sections: None,
            });
        }
        docs
    };
    if let Some(run) = run {
        for (name, bytes) in digests {
            run.input(role, &name, &bytes);
        }
    }
    let mut docs = docs;
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(docs)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default()
        .to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrepareSummary {
    pub accepted: usize,
    pub rejected: usize,
}

/// Section detection and cleaning over a directory of `*.txt` papers.
///
/// Writes `sections/<id>.sections.json`, `combined/<id>.txt` and
/// `rejections.csv` (`id,reason`).
pub fn cmd_prepare(cfg: &RunConfig, input: &Path, out: &Path) -> Result<PrepareSummary> {
    require_dir(input)?;
    let criteria = cfg.corpus.criteria()?;
    let cleaner = Cleaner::new(&cfg.corpus.cleaning)?;
    let mut run = RunWriter::new("prepare", out)?;
    let files = load_text_dir(input)?;
    if files.is_empty() {
        log::warn!("{}: no .txt files", input.display());
    }
    for (id, doc) in &files {
        if let Ok(d) = doc {
            run.input("input", &format!("{id}.txt"), d.body.as_bytes());
        }
    }
    let results: Vec<(String, Result<SectionedDocument, CorpusError>)> = pool(cfg.workers, || {
        files
            .par_iter()
            .map(|(id, doc)| {
                let r = match doc {
                    Ok(d) => prepare_document(d, &criteria, &cleaner),
                    Err(e) => Err(e.clone()),
                };
                (id.clone(), r)
            })
            .collect()
    })?;

    let mut rejections = Vec::new();
    let mut accepted = 0;
    for (id, r) in results {
        match r {
            Ok(doc) => {
                let json = serde_json::to_string_pretty(&doc).expect("document serializes") + "\n";
                run.write(&format!("sections/{id}.sections.json"), json)?;
                run.write(&format!("combined/{id}.txt"), &doc.combined)?;
                accepted += 1;
            }
            Err(e) => {
                log::info!("{id}: rejected ({})", e.reason());
                rejections.push(vec![id, e.reason()]);
            }
        }
    }
    run.write_csv("rejections.csv", &["id", "reason"], &rejections)?;
    let summary = PrepareSummary {
        accepted,
        rejected: rejections.len(),
    };
    run.count("accepted", summary.accepted);
    run.count("rejected", summary.rejected);
    run.finish(cfg)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    pub human_docs: usize,
    pub llm_docs: usize,
    pub vocabulary: usize,
    pub model_path: PathBuf,
}

pub const MODEL_FILE: &str = "model.tsv";

/// Trains a log-odds model and writes `model.tsv` plus `top_words.csv`.
/// Nothing is written unless both corpora load and train.
pub fn cmd_train(cfg: &RunConfig, human: &Path, llm: &Path, out: &Path) -> Result<TrainSummary> {
    require_dir(human)?;
    require_dir(llm)?;
    let human_docs = load_corpus(human, "human", None)?;
    let llm_docs = load_corpus(llm, "llm", None)?;
    let tok = |docs: &[CorpusDoc]| -> Vec<_> {
        docs.iter()
            .filter_map(|d| match tokenize_with(&d.text, cfg.tokenizer) {
                Ok(t) => Some(t),
                Err(e) => {
                    log::warn!("{}: skipped ({e})", d.id);
                    None
                }
            })
            .collect()
    };
    let (h_tokens, l_tokens) = (tok(&human_docs), tok(&llm_docs));
    let model = train_with(
        &build_profile(&h_tokens)?,
        &build_profile(&l_tokens)?,
        TrainOptions {
            smoothing: cfg.classifier.smoothing,
            min_doc_freq: cfg.classifier.min_doc_freq,
        },
    )?;
    let text = serialize_model(&model)?;
    let top = export_top_words(&model, cfg.classifier.top_words_threshold)?;

    let mut run = RunWriter::new("train", out)?;
    load_corpus(human, "human", Some(&mut run))?;
    load_corpus(llm, "llm", Some(&mut run))?;
    run.write(MODEL_FILE, text)?;
    let rows: Vec<Vec<String>> = top
        .llm
        .iter()
        .map(|(w, v)| vec![w.clone(), num(*v), "llm".into()])
        .chain(top.human.iter().map(|(w, v)| vec![w.clone(), num(*v), "human".into()]))
        .collect();
    run.write_csv("top_words.csv", &["word", "log_odds", "side"], &rows)?;
    run.count("human_docs", h_tokens.len());
    run.count("llm_docs", l_tokens.len());
    run.count("vocabulary", model.len());
    run.finish(cfg)?;
    Ok(TrainSummary {
        human_docs: h_tokens.len(),
        llm_docs: l_tokens.len(),
        vocabulary: model.len(),
        model_path: out.join(MODEL_FILE),
    })
}

/// Score and threshold of one text.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub scored: ScoredDocument,
    pub variance: f64,
    pub threshold: ThresholdResult,
    /// PELT changepoints at multiplier 1.
    pub changepoints_at_unit: Vec<usize>,
}

pub fn measure(cfg: &RunConfig, model: &LogOddsModel, id: &str, text: &str) -> Result<Measured> {
    let tokens = tokenize_with(text, cfg.tokenizer)?;
    let scored = score(model, &tokens, id)?;
    let series = Series::from_word_odds(&scored.word_odds, cfg.changepoint.signal);
    let detector = Detector::new()
        .with_cost_model(cfg.changepoint.cost_model)
        .with_min_segment_length(cfg.changepoint.min_segment_length);
    let threshold = detector.threshold_search_with_margin(&series, cfg.changepoint.margin)?;
    let changepoints_at_unit = if series.variance() > 0.0 {
        detector
            .pelt(series.values(), series.variance())?
            .changepoints
    } else {
        Vec::new()
    };
    Ok(Measured {
        variance: series.variance(),
        scored,
        threshold,
        changepoints_at_unit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSummary {
    pub scored: usize,
    pub skipped: usize,
    pub never_segments: usize,
}

pub const THRESHOLD_COLUMNS: &[&str] = &[
    "id",
    "length",
    "total",
    "variance",
    "threshold_multiplier",
    "never_segments",
    "passes",
    "doublings",
    "changepoints_at_unit_multiplier",
    "length_normalized_threshold",
];

/// Scores and thresholds every document of a prepared corpus.
///
/// Writes `scores.csv` (`id,length,total`), `thresholds.csv`, `skipped.csv`,
/// `section_scores.csv` when section texts are available, and
/// `series/<id>.series.csv` when enabled. Fails with a degeneracy error
/// (after writing) when every threshold is zero.
pub fn cmd_segment(cfg: &RunConfig, model_path: &Path, corpus: &Path, out: &Path) -> Result<SegmentSummary> {
    let model_bytes = std::fs::read(model_path).map_err(|e| PipelineError::io(model_path, e))?;
    let model = load_model(model_path)?;
    let docs = load_corpus(corpus, "corpus", None)?;
    let mut run = RunWriter::new("segment", out)?;
    run.input("model", &file_name(model_path), &model_bytes);
    load_corpus(corpus, "corpus", Some(&mut run))?;

    type SectionRow = (Section, std::result::Result<Measured, String>);
    let results: Vec<(String, Result<Measured>, Vec<SectionRow>)> = pool(cfg.workers, || {
        docs.par_iter()
            .map(|d| {
                let whole = measure(cfg, &model, &d.id, &d.text);
                let sections = d
                    .sections
                    .as_ref()
                    .map(|s| {
                        [Section::Abstract, Section::Introduction, Section::Conclusion]
                            .into_iter()
                            .map(|sec| {
                                let m = measure(cfg, &model, &d.id, s.section(sec)).map_err(|e| e.to_string());
                                (sec, m)
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                (d.id.clone(), whole, sections)
            })
            .collect()
    })?;

    let mut kept: Vec<(String, Measured)> = Vec::new();
    let mut skipped = Vec::new();
    let mut section_rows = Vec::new();
    for (id, whole, sections) in results {
        match whole {
            Ok(m) => {
                if !sections.is_empty() {
                    section_rows.push(section_row(&id, Section::Combined, &m));
                }
                for (sec, r) in sections {
                    match r {
                        Ok(sm) => section_rows.push(section_row(&id, sec, &sm)),
                        Err(e) => log::warn!("{id}/{sec}: {e}"),
                    }
                }
                kept.push((id, m));
            }
            Err(e) => {
                log::warn!("{id}: skipped ({e})");
                skipped.push(vec![id, e.to_string()]);
            }
        }
    }

    let lengths: Vec<usize> = kept.iter().map(|(_, m)| m.scored.length).collect();
    let mults: Vec<f64> = kept.iter().map(|(_, m)| m.threshold.multiplier).collect();
    let normalized = if kept.len() >= 2 {
        match normalize_thresholds(&mults, &lengths, cfg.stats.length_scheme, cfg.stats.bins) {
            Ok(v) => v.into_iter().map(num).collect(),
            Err(e) => {
                log::warn!("length normalization unavailable: {e}");
                vec![String::new(); kept.len()]
            }
        }
    } else {
        vec![String::new(); kept.len()]
    };

    let scores: Vec<Vec<String>> = kept
        .iter()
        .map(|(id, m)| vec![id.clone(), m.scored.length.to_string(), num(m.scored.total)])
        .collect();
    run.write_csv("scores.csv", &["id", "length", "total"], &scores)?;
    let rows: Vec<Vec<String>> = kept
        .iter()
        .zip(normalized)
        .map(|((id, m), norm)| {
            vec![
                id.clone(),
                m.scored.length.to_string(),
                num(m.scored.total),
                num(m.variance),
                num(m.threshold.multiplier),
                m.threshold.never_segments.to_string(),
                m.threshold.passes.to_string(),
                m.threshold.doublings.to_string(),
                m.changepoints_at_unit
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(";"),
                norm,
            ]
        })
        .collect();
    run.write_csv("thresholds.csv", THRESHOLD_COLUMNS, &rows)?;
    run.write_csv("skipped.csv", &["id", "reason"], &skipped)?;
    if !section_rows.is_empty() {
        run.write_csv(
            "section_scores.csv",
            &["id", "section", "length", "total", "threshold_multiplier"],
            &section_rows,
        )?;
    }
    if cfg.changepoint.write_series {
        for (id, m) in &kept {
            let tokens = tokenize_with(&docs.iter().find(|d| &d.id == id).expect("kept doc").text, cfg.tokenizer)?;
            let series: Vec<Vec<String>> = tokens
                .iter()
                .zip(m.scored.word_odds.iter().zip(&m.scored.cumsum))
                .enumerate()
                .map(|(i, (t, (w, c)))| vec![i.to_string(), t.to_string(), num(*w), num(*c)])
                .collect();
            run.write_csv(
                &format!("series/{id}.series.csv"),
                &["index", "token", "log_odds", "cumsum"],
                &series,
            )?;
        }
    }
    let summary = SegmentSummary {
        scored: kept.len(),
        skipped: skipped.len(),
        never_segments: kept.iter().filter(|(_, m)| m.threshold.never_segments).count(),
    };
    run.count("scored", summary.scored);
    run.count("skipped", summary.skipped);
    run.count("never_segments", summary.never_segments);
    run.finish(cfg)?;
    if !kept.is_empty() && mults.iter().all(|&m| m == 0.0) {
        return Err(PipelineError::Degenerate("every threshold multiplier is zero".into()));
    }
    Ok(summary)
}

fn section_row(id: &str, section: Section, m: &Measured) -> Vec<String> {
    vec![
        id.to_string(),
        section.to_string(),
        m.scored.length.to_string(),
        num(m.scored.total),
        num(m.threshold.multiplier),
    ]
}

pub const GROUPS: [&str; 3] = ["Original", "Regenerated", "Segmented"];

/// Pairs compared in the t-test table, as `(label, a, b)` group indices.
pub const COMPARISONS: [(&str, usize, usize); 3] = [
    ("Original vs. Regenerated", 0, 1),
    ("Segmented vs. Original", 2, 0),
    ("Segmented vs. Regenerated", 2, 1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub metric: String,
    pub means: [f64; 3],
    /// Aligned with [`COMPARISONS`].
    pub tests: Vec<crate::stats::TTest>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateSummary {
    pub triples: usize,
    pub skipped: usize,
    /// Threshold multiplier, then total log-odds.
    pub stats: Vec<GroupStats>,
}

/// Builds original/regenerated/segmented sets with the configured provider,
/// scores and thresholds all three, and compares the groups.
pub fn cmd_validate(cfg: &RunConfig, model_path: &Path, corpus: &Path, out: &Path) -> Result<ValidateSummary> {
    let model_bytes = std::fs::read(model_path).map_err(|e| PipelineError::io(model_path, e))?;
    let model = load_model(model_path)?;
    let docs = load_corpus(corpus, "corpus", None)?;
    let provider = build_provider(&cfg.provider, cfg.seed)?;
    let pairs: Vec<(String, String)> = docs.iter().map(|d| (d.id.clone(), d.text.clone())).collect();
    let sets = build_validation_sets(
        provider.as_ref(),
        &pairs,
        &ValidationOptions {
            target_fraction: cfg.validate.target_fraction,
            seed: cfg.seed,
            workers: cfg.provider.max_in_flight.min(cfg.workers).max(1),
        },
    )?;

    let mut run = RunWriter::new("validate", out)?;
    run.input("model", &file_name(model_path), &model_bytes);
    load_corpus(corpus, "corpus", Some(&mut run))?;
    for t in &sets.triples {
        run.write(&format!("validation/original/{}.txt", t.id), &t.original)?;
        run.write(&format!("validation/regenerated/{}.txt", t.id), &t.regenerated)?;
        run.write(&format!("validation/segmented/{}.txt", t.id), &t.segmented)?;
    }
    let manifest: String = sets
        .manifest
        .iter()
        .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
        .collect();
    run.write("manifest.jsonl", manifest)?;
    for (id, kind, exchange) in &sets.exchanges {
        let kind = match kind {
            ManifestKind::Original => "original",
            ManifestKind::Regenerated => "regenerated",
            ManifestKind::Segmented => "segmented",
        };
        let json = serde_json::to_string_pretty(exchange).expect("exchange serializes") + "\n";
        run.write(&format!("exchanges/{id}.{kind}.json"), json)?;
    }

    let jobs: Vec<(usize, &str, &str)> = sets
        .triples
        .iter()
        .flat_map(|t| {
            [
                (0, t.id.as_str(), t.original.as_str()),
                (1, t.id.as_str(), t.regenerated.as_str()),
                (2, t.id.as_str(), t.segmented.as_str()),
            ]
        })
        .collect();
    let measured: Vec<(usize, String, Result<Measured>)> = pool(cfg.workers, || {
        jobs.par_iter()
            .map(|&(g, id, text)| (g, id.to_string(), measure(cfg, &model, id, text)))
            .collect()
    })?;

    let mut skipped: Vec<SkipRecord> = sets.skipped.clone();
    let mut failed = std::collections::BTreeSet::new();
    for (g, id, m) in &measured {
        if let Err(e) = m {
            failed.insert(id.clone());
            skipped.push(SkipRecord {
                id: id.clone(),
                stage: format!("measure:{}", GROUPS[*g].to_lowercase()),
                reason: e.to_string(),
            });
        }
    }
    skipped.sort_by(|a, b| (&a.id, &a.stage).cmp(&(&b.id, &b.stage)));

    let spans: BTreeMap<&str, (usize, usize)> = sets
        .triples
        .iter()
        .map(|t| (t.id.as_str(), (t.span.start, t.span.end)))
        .collect();
    let mut thresholds: [Vec<f64>; 3] = Default::default();
    let mut totals: [Vec<f64>; 3] = Default::default();
    let mut confusion = [[0usize; 2]; 3];
    let mut rows = Vec::new();
    for (g, id, m) in &measured {
        let Ok(m) = m else { continue };
        if failed.contains(id) {
            continue;
        }
        thresholds[*g].push(m.threshold.multiplier);
        totals[*g].push(m.scored.total);
        let label = crate::classifier::classify(m.scored.total, cfg.classifier.decision_threshold);
        confusion[*g][usize::from(label == Label::Llm)] += 1;
        let (s0, s1) = if *g == 2 {
            let (a, b) = spans[id.as_str()];
            (a.to_string(), b.to_string())
        } else {
            (String::new(), String::new())
        };
        rows.push(vec![
            id.clone(),
            GROUPS[*g].to_lowercase(),
            m.scored.length.to_string(),
            num(m.scored.total),
            num(m.variance),
            num(m.threshold.multiplier),
            m.threshold.never_segments.to_string(),
            s0,
            s1,
        ]);
    }
    run.write_csv(
        "validation_scores.csv",
        &[
            "id",
            "group",
            "length",
            "total",
            "variance",
            "threshold_multiplier",
            "never_segments",
            "span_start",
            "span_end",
        ],
        &rows,
    )?;
    let skip_rows: Vec<Vec<String>> = skipped
        .iter()
        .map(|s| vec![s.id.clone(), s.stage.clone(), s.reason.clone()])
        .collect();
    run.write_csv("skipped.csv", &["id", "stage", "reason"], &skip_rows)?;
    let confusion_rows: Vec<Vec<String>> = GROUPS
        .iter()
        .zip(confusion)
        .map(|(g, [h, l])| vec![g.to_lowercase(), h.to_string(), l.to_string()])
        .collect();
    run.write_csv(
        "confusion.csv",
        &["group", "predicted_human", "predicted_llm"],
        &confusion_rows,
    )?;

    let mut summary_rows = Vec::new();
    let mut test_rows = Vec::new();
    let mut tables = String::new();
    let mut stats = Vec::new();
    let mut degenerate = None;
    for (metric, title, values) in [
        ("threshold_multiplier", "Threshold multiplier by group", &thresholds),
        ("total", "Total log-odds by group", &totals),
    ] {
        let groups: Vec<(&str, Vec<f64>)> =
            GROUPS.iter().copied().zip(values.iter().cloned()).collect();
        let summaries = group_summaries(&groups);
        for s in &summaries {
            summary_rows.push(vec![
                metric.to_string(),
                s.label.to_lowercase(),
                num(s.mean),
                num(s.sd),
                s.n.to_string(),
            ]);
        }
        tables.push_str(&render_summary_table(title, &summaries));
        tables.push('\n');
        let mut rendered = Vec::new();
        let mut tests = Vec::new();
        for (label, a, b) in COMPARISONS {
            match t_test(cfg.stats.ttest, &values[a], &values[b]) {
                Ok(t) => {
                    test_rows.push(vec![
                        metric.to_string(),
                        label.to_string(),
                        format!("{:?}", cfg.stats.ttest).to_lowercase(),
                        num(t.t),
                        num(t.df),
                        num(t.p),
                    ]);
                    rendered.push((label.to_string(), t));
                    tests.push(t);
                }
                Err(e) => {
                    log::warn!("{metric} {label}: {e}");
                    degenerate.get_or_insert(format!("{metric} {label}: {e}"));
                }
            }
        }
        tables.push_str(&render_ttest_table(&format!("{title}: t tests"), &rendered));
        tables.push('\n');
        let means = [0, 1, 2].map(|i| summaries.get(i).map_or(f64::NAN, |s| s.mean));
        stats.push(GroupStats {
            metric: metric.to_string(),
            means,
            tests,
        });
    }
    run.write_csv("summary.csv", &["metric", "group", "mean", "sd", "n"], &summary_rows)?;
    run.write_csv("ttests.csv", &["metric", "comparison", "kind", "t", "df", "p"], &test_rows)?;
    run.write("tables.txt", &tables)?;
    let hist: Vec<(&str, &[f64])> = GROUPS
        .iter()
        .zip(&thresholds)
        .map(|(g, v)| (*g, v.as_slice()))
        .collect();
    run.write(
        "histogram.svg",
        histogram_svg("Threshold multiplier by group", "threshold multiplier", &hist, 30),
    )?;

    let summary = ValidateSummary {
        triples: sets.triples.len() - failed.len(),
        skipped: skipped.len(),
        stats,
    };
    run.count("triples", summary.triples);
    run.count("skipped", summary.skipped);
    run.finish(cfg)?;
    match degenerate {
        Some(msg) => Err(PipelineError::Degenerate(msg)),
        None => Ok(summary),
    }
}

/// Reads named columns from a CSV, failing on the first missing one.
pub fn read_columns(path: &Path, columns: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| PipelineError::io(path, e))?;
    let headers = r.headers().map_err(|e| PipelineError::io(path, e))?.clone();
    let idx: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == *c)
                .ok_or_else(|| PipelineError::Schema {
                    file: path.display().to_string(),
                    column: c.to_string(),
                })
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| PipelineError::io(path, e))?;
        rows.push(idx.iter().map(|&i| rec.get(i).unwrap_or("").to_string()).collect());
    }
    Ok(rows)
}

fn parse_f64(path: &Path, column: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| PipelineError::Io {
        path: path.display().to_string(),
        message: format!("column `{column}`: `{v}` is not a number"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeSummary {
    pub raw: Vec<CorrelationRecord>,
    pub normalized: Vec<CorrelationRecord>,
    pub sections: Option<crate::stats::CorrelationMatrix>,
}

/// Length confound analysis over `thresholds.csv`-style input, plus the
/// section matrix when a section CSV is given.
pub fn cmd_analyze(
    cfg: &RunConfig,
    scores: &Path,
    section_scores: Option<&Path>,
    out: &Path,
) -> Result<AnalyzeSummary> {
    let cols = ["id", "length", "total", "threshold_multiplier"];
    let rows = read_columns(scores, &cols)?;
    let mut run = RunWriter::new("analyze", out)?;
    let bytes = std::fs::read(scores).map_err(|e| PipelineError::io(scores, e))?;
    run.input("scores", &file_name(scores), &bytes);

    let mut lengths = Vec::new();
    let mut totals = Vec::new();
    let mut thresholds = Vec::new();
    for r in &rows {
        lengths.push(parse_f64(scores, "length", &r[1])?);
        totals.push(parse_f64(scores, "total", &r[2])?);
        thresholds.push(parse_f64(scores, "threshold_multiplier", &r[3])?);
    }
    let (bins, strategy) = (cfg.stats.bins, cfg.stats.bin_strategy);
    let z_total = zscore_by_length_bins_with(&lengths, &totals, bins, strategy)?;
    let z_threshold = zscore_by_length_bins_with(&lengths, &thresholds, bins, strategy)?;
    let raw = vec![
        pearson_labeled(&lengths, &totals, "Length", "LogOdds")?,
        pearson_labeled(&lengths, &thresholds, "Length", "Threshold")?,
        pearson_labeled(&totals, &thresholds, "LogOdds", "Threshold")?,
    ];
    let normalized = vec![
        pearson_labeled(&lengths, &z_total, "Length", "LogOdds")?,
        pearson_labeled(&lengths, &z_threshold, "Length", "Threshold")?,
        pearson_labeled(&z_total, &z_threshold, "LogOdds", "Threshold")?,
    ];
    let corr_rows: Vec<Vec<String>> = [("raw", &raw), ("length_zscore", &normalized)]
        .iter()
        .flat_map(|(kind, recs)| {
            recs.iter().map(move |c| {
                vec![
                    kind.to_string(),
                    c.x.clone(),
                    c.y.clone(),
                    num(c.r),
                    num(c.p),
                    c.n.to_string(),
                ]
            })
        })
        .collect();
    run.write_csv("correlations.csv", &["normalization", "x", "y", "r", "p", "n"], &corr_rows)?;
    run.write(
        "correlations.txt",
        render_correlation_table(&[
            ("Raw variables", raw.clone()),
            ("Z-score normalized on length", normalized.clone()),
        ]),
    )?;
    let pts = |ys: &[f64]| -> Vec<(f64, f64)> { lengths.iter().copied().zip(ys.iter().copied()).collect() };
    run.write(
        "length_vs_total.svg",
        scatter_svg("Length vs total log-odds", "length (words)", "total log-odds", &pts(&totals)),
    )?;
    run.write(
        "length_vs_threshold.svg",
        scatter_svg("Length vs threshold", "length (words)", "threshold multiplier", &pts(&thresholds)),
    )?;
    run.write(
        "length_vs_total_normalized.svg",
        scatter_svg("Length vs total log-odds (z-scored)", "length (words)", "z", &pts(&z_total)),
    )?;
    run.write(
        "length_vs_threshold_normalized.svg",
        scatter_svg("Length vs threshold (z-scored)", "length (words)", "z", &pts(&z_threshold)),
    )?;

    let sections = match section_scores {
        Some(path) => {
            let rows = read_columns(path, &["id", "section", "threshold_multiplier"])?;
            let bytes = std::fs::read(path).map_err(|e| PipelineError::io(path, e))?;
            run.input("section_scores", &file_name(path), &bytes);
            let mut by_section: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
            for r in &rows {
                let v = parse_f64(path, "threshold_multiplier", &r[2])?;
                by_section.entry(r[1].clone()).or_default().push((r[0].clone(), v));
            }
            let order = ["abstract", "introduction", "conclusion", "combined"];
            let mut ordered: Vec<(String, Vec<(String, f64)>)> = order
                .iter()
                .filter_map(|s| by_section.remove(*s).map(|v| (capitalize(s), v)))
                .collect();
            ordered.extend(by_section);
            let m = section_correlation_matrix(&ordered)?;
            let mut cells = Vec::new();
            for i in 0..m.labels.len() {
                for j in 0..m.labels.len() {
                    let c = m.get(i, j);
                    cells.push(vec![c.x.clone(), c.y.clone(), num(c.r), num(c.p), c.n.to_string()]);
                }
            }
            run.write_csv("section_matrix.csv", &["row", "column", "r", "p", "n"], &cells)?;
            run.write("section_matrix.txt", render_section_matrix(&m))?;
            Some(m)
        }
        None => None,
    };
    run.count("documents", rows.len());
    run.finish(cfg)?;
    Ok(AnalyzeSummary {
        raw,
        normalized,
        sections,
    })
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_ascii_uppercase().to_string() + c.as_str())
        .unwrap_or_default()
}

/// Collects rendered tables and charts from earlier runs into `report.md`.
pub fn cmd_report(cfg: &RunConfig, runs: &[PathBuf], out: &Path) -> Result<usize> {
    let mut run = RunWriter::new("report", out)?;
    let mut md = String::from("# Stylistic segmentation report\n");
    let mut found = 0;
    for dir in runs {
        require_dir(dir)?;
        let name = file_name(dir);
        let manifest = dir.join("run_manifest.json");
        let command = std::fs::read(&manifest)
            .ok()
            .and_then(|b| {
                run.input("manifest", &format!("{name}/run_manifest.json"), &b);
                serde_json::from_slice::<serde_json::Value>(&b).ok()
            })
            .and_then(|v| v["command"].as_str().map(str::to_string))
            .unwrap_or_else(|| "unknown".into());
        md.push_str(&format!("\n## {name} ({command})\n"));
        for table in ["tables.txt", "correlations.txt", "section_matrix.txt"] {
            if let Ok(text) = std::fs::read_to_string(dir.join(table)) {
                md.push_str(&format!("\n```text\n{}```\n", text));
                found += 1;
            }
        }
        let mut svgs: Vec<PathBuf> = list_files(dir, "svg")?;
        svgs.sort();
        for svg in svgs {
            let f = file_name(&svg);
            let bytes = std::fs::read(&svg).map_err(|e| PipelineError::io(&svg, e))?;
            run.write(&format!("figures/{name}/{f}"), &bytes)?;
            md.push_str(&format!("\n![{f}](figures/{name}/{f})\n"));
            found += 1;
        }
    }
    run.write("report.md", md)?;
    run.count("items", found);
    run.finish(cfg)?;
    Ok(found)
}

/// Rewrites every document of a corpus with the configured provider into
/// `<id>.txt`, e.g. to build the LLM side of a training set.
pub fn cmd_regenerate(cfg: &RunConfig, corpus: &Path, out: &Path) -> Result<(usize, usize)> {
    let docs = load_corpus(corpus, "corpus", None)?;
    let provider = build_provider(&cfg.provider, cfg.seed)?;
    let pairs: Vec<(String, String)> = docs.into_iter().map(|d| (d.id, d.text)).collect();
    let workers = cfg.provider.max_in_flight.min(cfg.workers).max(1);
    let (done, skipped) = regenerate_corpus(provider.as_ref(), &pairs, workers)?;
    let mut run = RunWriter::new("regenerate", out)?;
    load_corpus(corpus, "corpus", Some(&mut run))?;
    let mut manifest = String::new();
    for p in &done {
        run.write(&format!("{}.txt", p.id), &p.regenerated)?;
        let rec = crate::regen::ManifestRecord {
            id: p.id.clone(),
            kind: ManifestKind::Regenerated,
            span: None,
            prompt_digest: Some(p.prompt_digest.clone()),
            provider_digest: Some(p.provider_digest.clone()),
            insertion_seed: None,
            text_sha256: sha_bytes(p.regenerated.as_bytes()),
        };
        manifest.push_str(&(serde_json::to_string(&rec).expect("record serializes") + "\n"));
    }
    run.write("manifest.jsonl", manifest)?;
    let rows: Vec<Vec<String>> = skipped
        .iter()
        .map(|s| vec![s.id.clone(), s.stage.clone(), s.reason.clone()])
        .collect();
    run.write_csv("skipped.csv", &["id", "stage", "reason"], &rows)?;
    run.count("regenerated", done.len());
    run.count("skipped", skipped.len());
    run.finish(cfg)?;
    Ok((done.len(), skipped.len()))
}

/// Layout of a synthetic fixture written by [`cmd_fixture`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixtureSpec {
    /// Well-formed papers under `papers/`.
    pub papers: usize,
    /// Papers that fail section detection, also under `papers/`.
    pub defective: usize,
    /// Prepared human texts under `train/human/`, rewritten into `train/llm/`.
    pub train: usize,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            papers: 60,
            defective: 6,
            train: 40,
            seed: 42,
        }
    }
}

/// Config used with the bundled fixture.
pub fn fixture_config(seed: u64) -> RunConfig {
    let mut cfg = RunConfig {
        seed,
        ..Default::default()
    };
    cfg.changepoint.signal = crate::changepoint::Signal::Raw;
    cfg
}

/// Writes a synthetic corpus: raw papers (some defective) for `prepare`, and
/// a paired human/LLM training set made with the mock provider.
pub fn cmd_fixture(spec: FixtureSpec, out: &Path) -> Result<()> {
    let cfg = fixture_config(spec.seed);
    let mut run = RunWriter::new("fixture", out)?;
    let papers = out.join("papers");
    let paths = crate::synth::write_corpus(&papers, spec.papers, spec.defective, spec.seed)
        .map_err(|e| PipelineError::io(&papers, e))?;
    for p in paths {
        let bytes = std::fs::read(&p).map_err(|e| PipelineError::io(&p, e))?;
        run.outputs.insert(format!("papers/{}", file_name(&p)), sha_bytes(&bytes));
    }

    let criteria = cfg.corpus.criteria()?;
    let cleaner = Cleaner::new(&cfg.corpus.cleaning)?;
    let human: Vec<(String, String)> = crate::synth::corpus(spec.train, spec.seed ^ 0x7452_4149_4e00)
        .into_iter()
        .map(|(id, text)| {
            let raw = crate::corpus::RawDocument::new(format!("train{}", &id[3..]), text)?;
            Ok((raw.id.clone(), prepare_document(&raw, &criteria, &cleaner)?.combined))
        })
        .collect::<Result<_>>()?;
    let provider = build_provider(&cfg.provider, cfg.seed)?;
    let (llm, skipped) = regenerate_corpus(provider.as_ref(), &human, cfg.workers)?;
    if let Some(s) = skipped.first() {
        return Err(PipelineError::Usage(format!("fixture regeneration failed for {}: {}", s.id, s.reason)));
    }
    for (id, text) in &human {
        run.write(&format!("train/human/{id}.txt"), text)?;
    }
    for p in &llm {
        run.write(&format!("train/llm/{}.txt", p.id), &p.regenerated)?;
    }
    run.write("styleseg.toml", cfg.to_toml())?;
    run.count("papers", spec.papers);
    run.count("defective", spec.defective);
    run.count("train", spec.train);
    run.finish(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(PipelineError::Degenerate("x".into()).exit_code(), 1);
        assert_eq!(PipelineError::Usage("x".into()).exit_code(), 2);
        assert_eq!(
            PipelineError::Schema {
                file: "f".into(),
                column: "total".into()
            }
            .exit_code(),
            2
        );
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        std::fs::write(&p, "id,length,threshold_multiplier\na,3,1\n").unwrap();
        let err = read_columns(&p, &["id", "length", "total"]).unwrap_err();
        assert!(matches!(err, PipelineError::Schema { ref column, .. } if column == "total"));
        assert!(err.to_string().contains("`total`"));
    }
}
