//! Offline provider: seeded synonym substitution and sentence reordering for
//! rewrites, template sentences in the LLM register for new paragraphs.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::provider::{sha256_hex, Completion, Provider, ProviderConfig, Task};
use super::wordlists::{synonym, LLM_FLAVORED, NEUTRAL};
use super::RegenError;

#[derive(Debug, Clone)]
pub struct MockProvider {
    cfg: ProviderConfig,
    seed: u64,
}

impl MockProvider {
    pub fn new(cfg: ProviderConfig, seed: u64) -> Self {
        Self { cfg, seed }
    }

    /// Output depends only on (seed, task, input), never on call order.
    fn rng_for(&self, task: &Task<'_>) -> ChaCha8Rng {
        let input = match task {
            Task::Rewrite { text } => text.to_string(),
            Task::NewParagraph {
                context,
                target_chars,
            } => format!("{target_chars}\u{0}{context}"),
        };
        let digest = sha256_hex(&[&self.seed.to_le_bytes(), task.kind().as_bytes(), input.as_bytes()]);
        let mut bytes = [0u8; 32];
        hex::decode_to_slice(&digest, &mut bytes).expect("sha256 hex");
        ChaCha8Rng::from_seed(bytes)
    }

    fn rewrite(&self, text: &str, rng: &mut ChaCha8Rng) -> String {
        let out: Vec<String> = text
            .split('\n')
            .map(|line| {
                let mut sentences = split_sentences(line);
                if sentences.len() > 2 && rng.random_bool(0.5) {
                    sentences.shuffle(rng);
                }
                sentences
                    .iter()
                    .map(|s| self.rewrite_sentence(s, rng))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        let mut out = out.join("\n");
        if out == text {
            out.push_str(" Notably, this offers significant insights.");
        }
        out
    }

    fn rewrite_sentence(&self, sentence: &str, rng: &mut ChaCha8Rng) -> String {
        let mut words: Vec<String> = Vec::new();
        for raw in sentence.split(' ').filter(|w| !w.is_empty()) {
            let (core, tail) = split_word(raw);
            let lower = core.to_ascii_lowercase();
            let mut word = match synonym(&lower) {
                Some(s) if rng.random_bool(self.cfg.mock_substitution_rate) => {
                    match_case(core, s)
                }
                _ => core.to_string(),
            };
            word.push_str(tail);
            words.push(word);
            if !tail.is_empty() {
                continue;
            }
            if rng.random_bool(self.cfg.mock_insertion_rate) {
                words.push(LLM_FLAVORED.choose(rng).expect("non-empty").to_string());
            }
        }
        words.join(" ")
    }

    /// Sentences in the LLM register, built word by word so the length
    /// lands close to `target_chars`.
    fn new_paragraph(&self, target_chars: usize, rng: &mut ChaCha8Rng) -> String {
        let target = target_chars.max(20);
        let mut p = String::new();
        let mut left_in_sentence = 0usize;
        while p.len() + 4 < target {
            let list = if rng.random_bool(0.35) { LLM_FLAVORED } else { NEUTRAL };
            let word = *list.choose(rng).expect("non-empty");
            if left_in_sentence == 0 {
                if !p.is_empty() {
                    p.push_str(". ");
                }
                p.push_str(&match_case("X", word));
                left_in_sentence = rng.random_range(10..=18);
            } else {
                p.push(' ');
                p.push_str(word);
            }
            left_in_sentence -= 1;
        }
        p.push('.');
        p
    }
}

fn split_sentences(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for word in line.split(' ') {
        if !cur.is_empty() {
            cur.push(' ');
        }
        cur.push_str(word);
        if word.ends_with(['.', '!', '?']) {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

fn split_word(raw: &str) -> (&str, &str) {
    let end = raw
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_ascii_alphanumeric())
        .map_or(0, |(i, c)| i + c.len_utf8());
    raw.split_at(end)
}

fn match_case(original: &str, replacement: &str) -> String {
    if original.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
        let mut c = replacement.chars();
        c.next()
            .map(|f| f.to_ascii_uppercase().to_string() + c.as_str())
            .unwrap_or_default()
    } else {
        replacement.to_string()
    }
}

impl Provider for MockProvider {
    fn digest(&self) -> String {
        sha256_hex(&[
            b"mock",
            &self.seed.to_le_bytes(),
            &self.cfg.mock_substitution_rate.to_le_bytes(),
            &self.cfg.mock_insertion_rate.to_le_bytes(),
        ])
    }

    fn complete(&self, task: &Task<'_>) -> Result<Completion, RegenError> {
        let prompt = task.render(&self.cfg);
        let mut rng = self.rng_for(task);
        let text = match *task {
            Task::Rewrite { text } => self.rewrite(text, &mut rng),
            Task::NewParagraph { target_chars, .. } => self.new_paragraph(target_chars, &mut rng),
        };
        Ok(Completion {
            prompt_digest: sha256_hex(&[prompt.as_bytes()]),
            request: serde_json::json!({ "provider": "mock", "task": task.kind(), "prompt": prompt }),
            response: serde_json::json!({ "text": text }),
            text,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mock(seed: u64) -> MockProvider {
        MockProvider::new(ProviderConfig::default(), seed)
    }

    #[test]
    fn rewrite_is_seeded() {
        let t = Task::Rewrite {
            text: "the quick brown fox",
        };
        let a = mock(42).complete(&t).unwrap().text;
        let b = mock(42).complete(&t).unwrap().text;
        assert_eq!(a, b);
        assert_ne!(a, "the quick brown fox");
    }

    #[test]
    fn rewrite_prefers_llm_synonyms() {
        let text = "We use this because it is easy to show and we think it is great. ".repeat(10);
        let out = mock(1).complete(&Task::Rewrite { text: &text }).unwrap().text;
        assert!(out.contains("utilize") || out.contains("demonstrate"));
        let before = text.matches("because").count();
        assert!(out.matches("because").count() < before);
    }

    #[test]
    fn paragraph_hits_target_length() {
        for target in [80usize, 300, 1200] {
            let p = mock(3)
                .complete(&Task::NewParagraph {
                    context: "ctx",
                    target_chars: target,
                })
                .unwrap()
                .text;
            let len = p.chars().count() as f64;
            assert!((len - target as f64).abs() <= 0.3 * target as f64, "{target} {len}");
            assert!(!p.contains('\n'));
        }
    }

    #[test]
    fn word_splitting_keeps_punctuation() {
        assert_eq!(split_word("model,"), ("model", ","));
        assert_eq!(split_word("(x)."), ("(x", ")."));
        assert_eq!(match_case("Because", "due"), "Due");
    }
}
