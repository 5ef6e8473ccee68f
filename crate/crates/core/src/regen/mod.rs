//! Paired corpora through an LLM provider: wholesale rewrites ("regenerated")
//! and single inserted paragraphs ("segmented").

mod http;
mod mock;
mod provider;
pub mod wordlists;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use http::HttpProvider;
pub use mock::MockProvider;
pub use provider::{
    build_provider, sha256_hex, Completion, Provider, ProviderConfig, ProviderKind, Task,
    DEFAULT_PARAGRAPH_PROMPT, DEFAULT_REWRITE_PROMPT,
};

/// Inserted paragraph length as a fraction of the host text.
pub const DEFAULT_TARGET_FRACTION: f64 = 0.194;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegenError {
    #[error("provider timed out after {0}s")]
    ProviderTimeout(u64),
    #[error("provider refused: {0}")]
    ProviderRefusal(String),
    #[error("rate limited (retry after {retry_after:?}s)")]
    RateLimited { retry_after: Option<f64> },
    #[error("provider returned an empty completion")]
    EmptyCompletion,
    #[error("provider returned the input unchanged")]
    UnchangedCompletion,
    #[error("input text is empty")]
    EmptyInput,
    #[error("text has {found} paragraph boundaries, need at least 2")]
    NoParagraphBoundary { found: usize },
    #[error("target fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("credential variable {0} is not set")]
    MissingCredential(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Original text with its provider rewrite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegenPair {
    pub id: String,
    pub original: String,
    pub regenerated: String,
    pub provider_digest: String,
    pub prompt_digest: String,
    pub request: serde_json::Value,
    pub response: serde_json::Value,
}

pub fn regenerate(provider: &dyn Provider, id: &str, text: &str) -> Result<RegenPair, RegenError> {
    if text.trim().is_empty() {
        return Err(RegenError::EmptyInput);
    }
    let c = provider.complete(&Task::Rewrite { text })?;
    let regenerated = c.text.trim().to_string();
    if regenerated.is_empty() {
        return Err(RegenError::EmptyCompletion);
    }
    if regenerated == text.trim() {
        return Err(RegenError::UnchangedCompletion);
    }
    Ok(RegenPair {
        id: id.to_string(),
        original: text.to_string(),
        regenerated,
        provider_digest: provider.digest(),
        prompt_digest: c.prompt_digest,
        request: c.request,
        response: c.response,
    })
}

/// Half-open character range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Injection {
    pub segmented: String,
    pub span: Span,
    pub target_chars: usize,
    pub prompt_digest: String,
    pub request: serde_json::Value,
    pub response: serde_json::Value,
}

/// Byte offsets where a paragraph starts after a blank line.
pub fn paragraph_boundaries(text: &str) -> Vec<usize> {
    let bytes = text.as_bytes();
    (2..bytes.len())
        .filter(|&i| bytes[i - 1] == b'\n' && bytes[i - 2] == b'\n' && !bytes[i].is_ascii_whitespace())
        .collect()
}

/// Deletes a character span.
pub fn remove_span(text: &str, span: Span) -> String {
    text.chars()
        .enumerate()
        .filter(|(i, _)| !(span.start..span.end).contains(i))
        .map(|(_, c)| c)
        .collect()
}

/// Inserts one provider-written paragraph at a uniformly chosen boundary.
pub fn inject_paragraph(
    provider: &dyn Provider,
    text: &str,
    target_fraction: f64,
    rng: &mut impl Rng,
) -> Result<Injection, RegenError> {
    if !(target_fraction > 0.0 && target_fraction < 1.0) {
        return Err(RegenError::InvalidFraction(target_fraction));
    }
    if text.trim().is_empty() {
        return Err(RegenError::EmptyInput);
    }
    let boundaries = paragraph_boundaries(text);
    if boundaries.len() < 2 {
        return Err(RegenError::NoParagraphBoundary {
            found: boundaries.len(),
        });
    }
    let at = boundaries[rng.random_range(0..boundaries.len())];
    let target_chars = (target_fraction * text.chars().count() as f64).round() as usize;
    let c = provider.complete(&Task::NewParagraph {
        context: text,
        target_chars,
    })?;
    // one paragraph: internal line breaks would add boundaries
    let paragraph = c.text.split_whitespace().collect::<Vec<_>>().join(" ");
    if paragraph.is_empty() {
        return Err(RegenError::EmptyCompletion);
    }
    let start = text[..at].chars().count();
    let inserted = format!("{paragraph}\n\n");
    let span = Span {
        start,
        end: start + inserted.chars().count(),
    };
    let mut segmented = String::with_capacity(text.len() + inserted.len());
    segmented.push_str(&text[..at]);
    segmented.push_str(&inserted);
    segmented.push_str(&text[at..]);
    Ok(Injection {
        segmented,
        span,
        target_chars,
        prompt_digest: c.prompt_digest,
        request: c.request,
        response: c.response,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifestKind {
    Original,
    Regenerated,
    Segmented,
}

/// One JSON-lines manifest row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: String,
    pub kind: ManifestKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub span: Option<Span>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prompt_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provider_digest: Option<String>,
    /// Seed of the insertion-position draw.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub insertion_seed: Option<u64>,
    pub text_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub id: String,
    pub stage: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationTriple {
    pub id: String,
    pub original: String,
    pub regenerated: String,
    pub segmented: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationSets {
    /// Sorted by id.
    pub triples: Vec<ValidationTriple>,
    pub manifest: Vec<ManifestRecord>,
    pub skipped: Vec<SkipRecord>,
    /// Raw provider exchanges keyed by `(id, kind)`.
    pub exchanges: Vec<(String, ManifestKind, serde_json::Value)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub target_fraction: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            target_fraction: DEFAULT_TARGET_FRACTION,
            seed: 0,
            workers: 4,
        }
    }
}

/// Per-document seed, independent of scheduling order.
pub fn document_seed(seed: u64, id: &str) -> u64 {
    let d = sha256_hex(&[&seed.to_le_bytes(), id.as_bytes()]);
    u64::from_str_radix(&d[..16], 16).expect("hex digest")
}

pub(crate) fn run_pool<T: Send>(
    workers: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, RegenError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RegenError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Rewrites every document; failures become skip records.
pub fn regenerate_corpus(
    provider: &dyn Provider,
    docs: &[(String, String)],
    workers: usize,
) -> Result<(Vec<RegenPair>, Vec<SkipRecord>), RegenError> {
    let results: Vec<_> = run_pool(workers, || {
        docs.par_iter()
            .map(|(id, text)| (id.clone(), regenerate(provider, id, text)))
            .collect()
    })?;
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for (id, r) in results {
        match r {
            Ok(p) => pairs.push(p),
            Err(e) => {
                log::warn!("{id}: regeneration failed: {e}");
                skipped.push(SkipRecord {
                    id,
                    stage: "regenerate".into(),
                    reason: e.to_string(),
                });
            }
        }
    }
    pairs.sort_by(|a, b| a.id.cmp(&b.id));
    skipped.sort_by(|a, b| a.id.cmp(&b.id));
    Ok((pairs, skipped))
}

enum Built {
    Triple(Box<(ValidationTriple, RegenPair, Injection, u64)>),
    Skip(SkipRecord),
}

fn build_one(provider: &dyn Provider, id: &str, text: &str, opts: &ValidationOptions) -> Built {
    let skip = |stage: &str, e: RegenError| {
        log::warn!("{id}: {stage} failed: {e}");
        Built::Skip(SkipRecord {
            id: id.to_string(),
            stage: stage.into(),
            reason: e.to_string(),
        })
    };
    let pair = match regenerate(provider, id, text) {
        Ok(p) => p,
        Err(e) => return skip("regenerate", e),
    };
    let insertion_seed = document_seed(opts.seed, id);
    let mut rng = ChaCha8Rng::seed_from_u64(insertion_seed);
    let inj = match inject_paragraph(provider, text, opts.target_fraction, &mut rng) {
        Ok(i) => i,
        Err(e) => return skip("inject", e),
    };
    let triple = ValidationTriple {
        id: id.to_string(),
        original: text.to_string(),
        regenerated: pair.regenerated.clone(),
        segmented: inj.segmented.clone(),
        span: inj.span,
    };
    Built::Triple(Box::new((triple, pair, inj, insertion_seed)))
}

/// Original, regenerated and segmented versions of each document, aligned by id.
pub fn build_validation_sets(
    provider: &dyn Provider,
    docs: &[(String, String)],
    opts: &ValidationOptions,
) -> Result<ValidationSets, RegenError> {
    if !(opts.target_fraction > 0.0 && opts.target_fraction < 1.0) {
        return Err(RegenError::InvalidFraction(opts.target_fraction));
    }
    let mut built: Vec<(String, Built)> = run_pool(opts.workers, || {
        docs.par_iter()
            .map(|(id, text)| (id.clone(), build_one(provider, id, text, opts)))
            .collect()
    })?;
    built.sort_by(|a, b| a.0.cmp(&b.0));
    let digest = provider.digest();
    let mut out = ValidationSets::default();
    for (_, b) in built {
        match b {
            Built::Skip(s) => out.skipped.push(s),
            Built::Triple(t) => {
                let (triple, pair, inj, insertion_seed) = *t;
                let id = triple.id.clone();
                let hash = |s: &str| sha256_hex(&[s.as_bytes()]);
                out.manifest.push(ManifestRecord {
                    id: id.clone(),
                    kind: ManifestKind::Original,
                    span: None,
                    prompt_digest: None,
                    provider_digest: None,
                    insertion_seed: None,
                    text_sha256: hash(&triple.original),
                });
                out.manifest.push(ManifestRecord {
                    id: id.clone(),
                    kind: ManifestKind::Regenerated,
                    span: None,
                    prompt_digest: Some(pair.prompt_digest),
                    provider_digest: Some(digest.clone()),
                    insertion_seed: None,
                    text_sha256: hash(&triple.regenerated),
                });
                out.manifest.push(ManifestRecord {
                    id: id.clone(),
                    kind: ManifestKind::Segmented,
                    span: Some(inj.span),
                    prompt_digest: Some(inj.prompt_digest),
                    provider_digest: Some(digest.clone()),
                    insertion_seed: Some(insertion_seed),
                    text_sha256: hash(&triple.segmented),
                });
                let exchange = |req, resp| serde_json::json!({ "request": req, "response": resp });
                out.exchanges.push((
                    id.clone(),
                    ManifestKind::Regenerated,
                    exchange(pair.request, pair.response),
                ));
                out.exchanges
                    .push((id, ManifestKind::Segmented, exchange(inj.request, inj.response)));
                out.triples.push(triple);
            }
        }
    }
    Ok(out)
}
