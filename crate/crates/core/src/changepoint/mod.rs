//! Changepoint detection on scored-document series.

mod cost;
mod pelt;
mod threshold;

use serde::{Deserialize, Serialize};

pub use cost::{segment_cost, CostModel, L2Cost, SegmentCost};
pub use pelt::{Detector, PeltResult};
pub use threshold::{
    normalize_threshold_for_length, normalize_thresholds, normalized_penalty, LengthScheme,
    ThresholdResult, DEFAULT_MARGIN,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChangepointError {
    #[error("series of length {len} is too short for minimum segment length {min_segment_length}")]
    SeriesTooShort { len: usize, min_segment_length: usize },
    #[error("segment [{start}, {end}] out of range for series of length {len}")]
    IndexOutOfRange { start: usize, end: usize, len: usize },
    #[error("penalty must be finite and non-negative, got {0}")]
    InvalidPenalty(f64),
    #[error("margin must be finite and positive, got {0}")]
    InvalidMargin(f64),
    #[error("variance must be finite and non-negative, got {0}")]
    InvalidVariance(f64),
    #[error("series contains non-finite values")]
    NonFinite,
    #[error("threshold search did not terminate")]
    ThresholdDiverged,
    #[error("length must be positive")]
    ZeroLength,
    #[error("{0} thresholds but {1} lengths")]
    LengthMismatch(usize, usize),
    #[error("length normalization failed: {0}")]
    Normalization(String),
}

/// Which view of a scored document PELT runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    /// Running sum of per-word log-odds.
    #[default]
    CumSum,
    /// Per-word log-odds.
    Raw,
}

impl std::str::FromStr for Signal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cumsum" | "cum_sum" => Ok(Self::CumSum),
            "raw" => Ok(Self::Raw),
            other => Err(format!("unknown signal `{other}`")),
        }
    }
}

/// Values handed to PELT plus the variance that scales its penalty.
///
/// The variance always refers to the per-word log-odds, even when the
/// values are their cumulative sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    variance: f64,
}

impl Series {
    pub fn new(values: Vec<f64>, variance: f64) -> Result<Self, ChangepointError> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(ChangepointError::InvalidVariance(variance));
        }
        Ok(Self { values, variance })
    }

    pub fn from_word_odds(word_odds: &[f64], signal: Signal) -> Self {
        let values = match signal {
            Signal::Raw => word_odds.to_vec(),
            Signal::CumSum => word_odds
                .iter()
                .scan(0.0, |acc, &x| {
                    *acc += x;
                    Some(*acc)
                })
                .collect(),
        };
        Self {
            values,
            variance: population_variance(word_odds),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn population_variance(xs: &[f64]) -> f64 {
    // exact zero for constant input; the rounded mean would leave a residue
    if xs.windows(2).all(|w| w[0] == w[1]) {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}

/// PELT with the default L2 cost.
pub fn pelt(
    series: &Series,
    penalty: f64,
    min_segment_length: usize,
) -> Result<PeltResult, ChangepointError> {
    Detector::new()
        .with_min_segment_length(min_segment_length)
        .pelt(series.values(), penalty)
}

/// Unpruned optimal partitioning with the default L2 cost.
pub fn optimal_partitioning(
    series: &Series,
    penalty: f64,
    min_segment_length: usize,
) -> Result<PeltResult, ChangepointError> {
    Detector::new()
        .with_min_segment_length(min_segment_length)
        .optimal_partitioning(series.values(), penalty)
}

pub fn threshold_search(
    series: &Series,
    min_segment_length: usize,
) -> Result<ThresholdResult, ChangepointError> {
    Detector::new()
        .with_min_segment_length(min_segment_length)
        .threshold_search(series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumsum_series_keeps_word_variance() {
        let w = [1.0, -1.0, 2.0, 0.0];
        let s = Series::from_word_odds(&w, Signal::CumSum);
        assert_eq!(s.values(), &[1.0, 0.0, 2.0, 2.0]);
        // mean 0.5, deviations .5 1.5 1.5 .5 -> (0.25+2.25+2.25+0.25)/4
        assert!((s.variance() - 1.25).abs() < 1e-12);
        assert_eq!(Series::from_word_odds(&w, Signal::Raw).variance(), s.variance());
    }

    #[test]
    fn constant_word_odds_have_zero_variance() {
        for signal in [Signal::Raw, Signal::CumSum] {
            let s = Series::from_word_odds(&[0.7; 40], signal);
            assert_eq!(s.variance(), 0.0);
            assert!(threshold_search(&s, 2).unwrap().never_segments);
        }
    }

    #[test]
    fn tiny_variance_search_terminates() {
        let ramp: Vec<f64> = (0..40).map(f64::from).collect();
        let r = threshold_search(&Series::new(ramp, 1e-30).unwrap(), 2).unwrap();
        assert!(r.multiplier > 1e30 && !r.never_segments);
    }

    #[test]
    fn negative_variance_rejected() {
        assert!(Series::new(vec![1.0], -0.1).is_err());
    }
}
