//! Rewrite and paragraph injection with the offline mock provider.
//!
//! Point `ProviderConfig` at a chat-completion endpoint (`kind = Http`) to use
//! a live model instead; the credential is read from the environment
//! variable named in `credential_env`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use styleseg::regen::{
    build_validation_sets, inject_paragraph, regenerate, remove_span, MockProvider,
    ProviderConfig, ValidationOptions, DEFAULT_TARGET_FRACTION,
};

const TEXT: &str = "We think the method is quite easy to use because it needs a lot less data.\n\n\
We hope it will come in handy for recent problems. The rough idea is plain and we tell how to pick the values.\n\n\
In short, the results are great and we thank the reviewers for a really useful bit of advice.";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let provider = MockProvider::new(ProviderConfig::default(), 42);

    let pair = regenerate(&provider, "demo", TEXT)?;
    println!("rewrite:\n{}\n", pair.regenerated);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inj = inject_paragraph(&provider, TEXT, DEFAULT_TARGET_FRACTION, &mut rng)?;
    println!(
        "inserted chars {}..{} (target {} chars):\n{}\n",
        inj.span.start, inj.span.end, inj.target_chars, inj.segmented
    );
    assert_eq!(remove_span(&inj.segmented, inj.span), TEXT);

    let docs: Vec<(String, String)> = (0..4).map(|i| (format!("doc{i}"), format!("{TEXT}\n\nNote {i}."))).collect();
    let sets = build_validation_sets(&provider, &docs, &ValidationOptions::default())?;
    for r in sets.manifest.iter().take(3) {
        println!("{}", serde_json::to_string(r)?);
    }
    println!("{} triples, {} skipped", sets.triples.len(), sets.skipped.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
