//! PELT on a step series, checked against optimal partitioning, and the
//! threshold multiplier of a flat versus a shifted series.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use styleseg::changepoint::{optimal_partitioning, pelt, threshold_search, Series, Signal};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 1.0)?;

    let mut step: Vec<f64> = (0..300).map(|_| noise.sample(&mut rng)).collect();
    for x in &mut step[120..180] {
        *x += 2.5;
    }
    let series = Series::from_word_odds(&step, Signal::Raw);
    let penalty = 10.0 * series.variance();
    let fast = pelt(&series, penalty, 2)?;
    let exact = optimal_partitioning(&series, penalty, 2)?;
    assert_eq!(fast.changepoints, exact.changepoints);
    println!("changepoints at penalty {penalty:.2}: {:?}", fast.changepoints);

    let flat: Vec<f64> = (0..300).map(|_| noise.sample(&mut rng)).collect();
    for (name, values) in [("flat", &flat), ("shifted", &step)] {
        let r = threshold_search(&Series::from_word_odds(values, Signal::Raw), 2)?;
        println!(
            "{name:<8} threshold multiplier {:>7.3} ({} PELT passes)",
            r.multiplier, r.passes
        );
    }

    let constant = Series::from_word_odds(&[0.5; 50], Signal::CumSum);
    let r = threshold_search(&constant, 2)?;
    println!("constant series: never segments = {}", r.never_segments);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
