use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ClassifierError;
use crate::corpus::TokenStream;

/// `count(w) / len(tokens)` for every word of a document.
pub fn frequency_rates(tokens: &TokenStream) -> Result<BTreeMap<String, f64>, ClassifierError> {
    Ok(counts(tokens)?
        .into_iter()
        .map(|(w, (c, n))| (w.to_string(), c as f64 / n as f64))
        .collect())
}

fn counts(tokens: &TokenStream) -> Result<HashMap<&str, (usize, usize)>, ClassifierError> {
    if tokens.is_empty() {
        return Err(ClassifierError::EmptyTokenStream);
    }
    let n = tokens.len();
    let mut map: HashMap<&str, (usize, usize)> = HashMap::new();
    for t in tokens.iter() {
        map.entry(t).or_insert((0, n)).0 += 1;
    }
    Ok(map)
}

/// Mean per-document frequency rates of a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    rates: BTreeMap<String, f64>,
    doc_freq: BTreeMap<String, usize>,
    doc_count: usize,
}

impl FrequencyProfile {
    pub fn rates(&self) -> &BTreeMap<String, f64> {
        &self.rates
    }

    /// Mean rate; 0 for words the corpus never uses.
    pub fn rate(&self, word: &str) -> f64 {
        self.rates.get(word).copied().unwrap_or(0.0)
    }

    /// Number of documents containing the word.
    pub fn doc_freq(&self, word: &str) -> usize {
        self.doc_freq.get(word).copied().unwrap_or(0)
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// SHA-256 over the sorted `word<TAB>rate` rows and the document count.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("docs={}\n", self.doc_count));
        for (w, r) in &self.rates {
            h.update(w.as_bytes());
            h.update(b"\t");
            h.update(r.to_bits().to_le_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

pub fn build_profile(docs: &[TokenStream]) -> Result<FrequencyProfile, ClassifierError> {
    build_profile_with(docs.iter())
}

/// Same as [`build_profile`] over any iterator of token streams.
pub fn build_profile_with<'a, I>(docs: I) -> Result<FrequencyProfile, ClassifierError>
where
    I: IntoIterator<Item = &'a TokenStream>,
{
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
    let mut doc_count = 0usize;
    for doc in docs {
        let mut per_doc: Vec<(&str, (usize, usize))> = counts(doc)?.into_iter().collect();
        // fixed accumulation order keeps the profile bit-reproducible
        per_doc.sort_unstable_by(|a, b| a.0.cmp(b.0));
        for (w, (c, n)) in per_doc {
            *sums.entry(w.to_string()).or_insert(0.0) += c as f64 / n as f64;
            *doc_freq.entry(w.to_string()).or_insert(0) += 1;
        }
        doc_count += 1;
    }
    if doc_count == 0 {
        return Err(ClassifierError::EmptyCorpus);
    }
    let rates = sums
        .into_iter()
        .map(|(w, s)| (w, s / doc_count as f64))
        .collect();
    Ok(FrequencyProfile {
        rates,
        doc_freq,
        doc_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(words: &[&str]) -> TokenStream {
        words.iter().copied().collect()
    }

    #[test]
    fn rates_of_a_document() {
        let r = frequency_rates(&ts(&["a", "a", "b"])).unwrap();
        assert_eq!(r["a"], 2.0 / 3.0);
        assert_eq!(r["b"], 1.0 / 3.0);
        assert_eq!(frequency_rates(&ts(&["w"])).unwrap()["w"], 1.0);
        assert_eq!(
            frequency_rates(&ts(&[])).unwrap_err(),
            ClassifierError::EmptyTokenStream
        );
    }

    #[test]
    fn profile_averages_documents() {
        let p = build_profile(&[ts(&["a", "a", "b"]), ts(&["b", "b"])]).unwrap();
        assert!((p.rate("a") - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.rate("b") - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.doc_freq("b"), 2);
        assert_eq!(p.doc_count(), 2);
    }

    #[test]
    fn single_document_profile_is_its_rates() {
        let d = ts(&["x", "y", "y", "z"]);
        let p = build_profile(std::slice::from_ref(&d)).unwrap();
        assert_eq!(p.rates(), &frequency_rates(&d).unwrap());
    }

    #[test]
    fn empty_corpus() {
        assert_eq!(build_profile(&[]).unwrap_err(), ClassifierError::EmptyCorpus);
        assert_eq!(
            build_profile(&[ts(&["a"]), ts(&[])]).unwrap_err(),
            ClassifierError::EmptyTokenStream
        );
    }

    #[test]
    fn digest_changes_with_content() {
        let a = build_profile(&[ts(&["a", "b"])]).unwrap();
        let b = build_profile(&[ts(&["a", "a", "b"])]).unwrap();
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), build_profile(&[ts(&["b", "a"])]).unwrap().digest());
    }
}
