use serde::{Deserialize, Serialize};

use super::CorpusError;

/// Lowercase word tokens of a text, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub tokens: Vec<String>,
    /// Character count of the source text.
    pub source_len: usize,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    /// Token-stream concatenation.
    pub fn concat(&self, other: &TokenStream) -> TokenStream {
        let mut tokens = self.tokens.clone();
        tokens.extend(other.tokens.iter().cloned());
        TokenStream {
            tokens,
            source_len: self.source_len + other.source_len,
        }
    }
}

impl<S: Into<String>> FromIterator<S> for TokenStream {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let tokens: Vec<String> = iter.into_iter().map(Into::into).collect();
        let source_len = tokens.iter().map(|t| t.len() + 1).sum::<usize>().saturating_sub(1);
        TokenStream { tokens, source_len }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerOptions {
    /// Tokens shorter than this are dropped.
    pub min_len: usize,
    pub lowercase: bool,
}

impl Default for TokenizerOptions {
    fn default() -> Self {
        Self {
            min_len: 1,
            lowercase: true,
        }
    }
}

/// Splits on everything that is not an ASCII letter and lowercases.
/// No stemming.
pub fn tokenize(text: &str) -> Result<TokenStream, CorpusError> {
    tokenize_with(text, TokenizerOptions::default())
}

pub fn tokenize_with(text: &str, options: TokenizerOptions) -> Result<TokenStream, CorpusError> {
    let tokens: Vec<String> = text
        .split(|c: char| !c.is_ascii_alphabetic())
        .filter(|t| !t.is_empty() && t.len() >= options.min_len)
        .map(|t| {
            if options.lowercase {
                t.to_ascii_lowercase()
            } else {
                t.to_string()
            }
        })
        .collect();
    if tokens.is_empty() {
        return Err(CorpusError::EmptyTokenStream);
    }
    Ok(TokenStream {
        tokens,
        source_len: text.chars().count(),
    })
}
