use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RegenError;

pub const DEFAULT_REWRITE_PROMPT: &str =
    "Rewrite the following academic text preserving its meaning:\n\n{text}";
pub const DEFAULT_PARAGRAPH_PROMPT: &str = "Write one new paragraph of about {chars} characters \
that could be added to the following academic text. Reply with the paragraph only.\n\n{text}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    #[default]
    Mock,
    /// Chat-completion style JSON endpoint.
    Http,
}

/// Provider settings. Holds the *name* of the credential variable, never
/// the credential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token; empty for none.
    pub credential_env: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub max_in_flight: usize,
    /// 0 disables client-side rate limiting.
    pub requests_per_minute: u32,
    pub temperature: f64,
    pub rewrite_prompt: String,
    pub paragraph_prompt: String,
    /// Mock only: probability of replacing a word that has a preferred synonym.
    pub mock_substitution_rate: f64,
    /// Mock only: probability of inserting an LLM-flavoured word after a word.
    pub mock_insertion_rate: f64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            kind: ProviderKind::Mock,
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-3.5-turbo".into(),
            credential_env: "OPENAI_API_KEY".into(),
            timeout_secs: 60,
            max_retries: 3,
            max_in_flight: 4,
            requests_per_minute: 0,
            temperature: 0.7,
            rewrite_prompt: DEFAULT_REWRITE_PROMPT.into(),
            paragraph_prompt: DEFAULT_PARAGRAPH_PROMPT.into(),
            mock_substitution_rate: 0.7,
            mock_insertion_rate: 0.08,
        }
    }
}

/// What the provider is asked to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task<'a> {
    Rewrite { text: &'a str },
    NewParagraph { context: &'a str, target_chars: usize },
}

impl Task<'_> {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Rewrite { .. } => "rewrite",
            Task::NewParagraph { .. } => "new_paragraph",
        }
    }

    pub fn render(&self, cfg: &ProviderConfig) -> String {
        match *self {
            Task::Rewrite { text } => cfg.rewrite_prompt.replace("{text}", text),
            Task::NewParagraph {
                context,
                target_chars,
            } => cfg
                .paragraph_prompt
                .replace("{chars}", &target_chars.to_string())
                .replace("{text}", context),
        }
    }
}

/// Provider output plus the raw exchange, kept for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completion {
    pub text: String,
    pub prompt_digest: String,
    pub request: serde_json::Value,
    pub response: serde_json::Value,
}

pub trait Provider: Send + Sync {
    /// Stable identity of the provider configuration (no secrets).
    fn digest(&self) -> String;

    fn complete(&self, task: &Task<'_>) -> Result<Completion, RegenError>;
}

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

/// Builds the provider named by `cfg.kind`.
pub fn build_provider(cfg: &ProviderConfig, seed: u64) -> Result<Box<dyn Provider>, RegenError> {
    Ok(match cfg.kind {
        ProviderKind::Mock => Box::new(super::MockProvider::new(cfg.clone(), seed)),
        ProviderKind::Http => Box::new(super::HttpProvider::new(cfg.clone())?),
    })
}
