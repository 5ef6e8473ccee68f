//! A score that grows with document length correlates with length; z-scoring
//! it within 25 length bins removes the correlation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use styleseg::stats::{pearson_labeled, render_correlation_table, zscore_by_length_bins};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.3)?;
    let lengths: Vec<f64> = (0..1000).map(|_| rng.random_range(300..3000) as f64).collect();
    let scores: Vec<f64> = lengths.iter().map(|l| 0.001 * l + noise.sample(&mut rng)).collect();

    let z = zscore_by_length_bins(&lengths, &scores, 25)?;
    let raw = pearson_labeled(&lengths, &scores, "Length", "Score")?;
    let normalized = pearson_labeled(&lengths, &z, "Length", "Score")?;
    print!(
        "{}",
        render_correlation_table(&[
            ("Raw", vec![raw.clone()]),
            ("Z-score normalized on length", vec![normalized.clone()]),
        ])
    );
    assert!(raw.r.abs() > 0.5 && normalized.r.abs() < 0.05);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
