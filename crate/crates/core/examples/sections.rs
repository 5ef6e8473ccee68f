//! Section detection, cleaning and tokenization of one paper.
//!
//! ```text
//! cargo run --example sections
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use styleseg::corpus::{
    detect_sections, prepare_document, tokenize, Cleaner, CleaningRules, CorpusError, Criteria,
    RawDocument, Section,
};
use styleseg::synth::{paper, Defect};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let doc = RawDocument::new("paper", paper(&mut rng, None))?;
    let criteria = Criteria::default();

    let raw = detect_sections(&doc, &criteria)?;
    let cleaner = Cleaner::new(&CleaningRules::default())?;
    let clean = prepare_document(&doc, &criteria, &cleaner)?;
    for s in [Section::Abstract, Section::Introduction, Section::Conclusion] {
        println!(
            "{:<13} raw {:>5} chars, cleaned {:>5} chars",
            s.label(),
            raw.section(s).chars().count(),
            clean.section(s).chars().count()
        );
    }
    assert!(raw.abstract_text.contains("Keywords:"));
    assert!(!clean.abstract_text.contains("Keywords:"));

    let tokens = tokenize(&clean.combined)?;
    let preview: Vec<&str> = tokens.iter().take(8).collect();
    println!("{} tokens: {} ...", tokens.len(), preview.join(" "));

    for defect in [Defect::MissingConclusion, Defect::ShortAbstract, Defect::ConclusionFirst] {
        let bad = RawDocument::new("bad", paper(&mut rng, Some(defect)))?;
        let err: CorpusError = detect_sections(&bad, &criteria).unwrap_err();
        println!("{defect:?}: rejected as {}", err.reason());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
