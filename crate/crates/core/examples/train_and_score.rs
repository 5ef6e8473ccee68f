//! Train a log-odds model on human texts and their mock rewrites, save it,
//! and score held-out documents.

use styleseg::classifier::{
    build_profile, export_top_words, parse_model, score, serialize_model, train,
};
use styleseg::corpus::{prepare_document, tokenize, Cleaner, CleaningRules, Criteria, RawDocument};
use styleseg::regen::{regenerate_corpus, MockProvider, ProviderConfig};
use styleseg::stats::welch_t;
use styleseg::synth::corpus;

fn prepared(n: usize, seed: u64) -> Vec<(String, String)> {
    let criteria = Criteria::default();
    let cleaner = Cleaner::new(&CleaningRules::default()).expect("default rules compile");
    corpus(n, seed)
        .into_iter()
        .map(|(id, text)| {
            let raw = RawDocument::new(id.clone(), text).expect("non-empty");
            let doc = prepare_document(&raw, &criteria, &cleaner).expect("synthetic papers are well formed");
            (id, doc.combined)
        })
        .collect()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let provider = MockProvider::new(ProviderConfig::default(), 42);
    let (train_pairs, _) = regenerate_corpus(&provider, &prepared(30, 1), 2)?;
    let human: Vec<_> = train_pairs.iter().map(|p| tokenize(&p.original)).collect::<Result<_, _>>()?;
    let llm: Vec<_> = train_pairs.iter().map(|p| tokenize(&p.regenerated)).collect::<Result<_, _>>()?;
    let model = train(&build_profile(&human)?, &build_profile(&llm)?);
    println!("vocabulary {} words, |log-odds| <= {:.3}", model.len(), model.bound());

    // the model file round-trips exactly
    let text = serialize_model(&model)?;
    assert_eq!(parse_model(&text)?, model);

    let top = export_top_words(&model, 1.0)?;
    let llm_words: Vec<&str> = top.llm.iter().take(5).map(|(w, _)| w.as_str()).collect();
    let human_words: Vec<&str> = top.human.iter().take(5).map(|(w, _)| w.as_str()).collect();
    println!("most LLM-leaning:   {}", llm_words.join(", "));
    println!("most human-leaning: {}", human_words.join(", "));

    let (held_out, _) = regenerate_corpus(&provider, &prepared(20, 2), 2)?;
    let mut h_totals = Vec::new();
    let mut l_totals = Vec::new();
    for p in &held_out {
        h_totals.push(score(&model, &tokenize(&p.original)?, &p.id)?.total);
        l_totals.push(score(&model, &tokenize(&p.regenerated)?, &p.id)?.total);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let t = welch_t(&l_totals, &h_totals)?;
    println!(
        "held-out mean total: human {:.2}, llm {:.2} (Welch t {:.2}, p {:.2e})",
        mean(&h_totals),
        mean(&l_totals),
        t.t,
        t.p
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
