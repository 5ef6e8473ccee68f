//! Variance-normalised penalty calibration.
//!
//! The threshold multiplier of a document is the smallest multiple of its
//! word log-odds variance that, used as the PELT penalty, leaves the series
//! unsegmented. The search doubles an upper bound from 1.0 and then bisects
//! the bracket down to the margin, so it costs `O(log M)` PELT passes.

use serde::{Deserialize, Serialize};

use super::{ChangepointError, Detector, Series};

/// Bracket width at which bisection stops.
pub const DEFAULT_MARGIN: f64 = 1e-2;

const MAX_DOUBLINGS: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Midpoint of the final bracket; 0 when the series never segments.
    pub multiplier: f64,
    pub margin: f64,
    /// Number of PELT invocations.
    pub passes: u32,
    pub doublings: u32,
    /// Set when the series has zero variance or shows no changepoint even
    /// at penalty 0.
    pub never_segments: bool,
}

/// `multiplier * series.variance`.
pub fn normalized_penalty(series: &Series, multiplier: f64) -> f64 {
    multiplier * series.variance()
}

impl Detector {
    pub fn threshold_search(&self, series: &Series) -> Result<ThresholdResult, ChangepointError> {
        self.threshold_search_with_margin(series, DEFAULT_MARGIN)
    }

    pub fn threshold_search_with_margin(
        &self,
        series: &Series,
        margin: f64,
    ) -> Result<ThresholdResult, ChangepointError> {
        if !(margin > 0.0 && margin.is_finite()) {
            return Err(ChangepointError::InvalidMargin(margin));
        }
        let values = series.values();
        if values.len() < 2 * self.min_segment_length() {
            return Err(ChangepointError::SeriesTooShort {
                len: values.len(),
                min_segment_length: self.min_segment_length(),
            });
        }
        let never = |passes| ThresholdResult {
            multiplier: 0.0,
            margin,
            passes,
            doublings: 0,
            never_segments: true,
        };
        if series.variance() == 0.0 {
            return Ok(never(0));
        }

        let mut passes = 0u32;
        let mut segments = |multiplier: f64| -> Result<bool, ChangepointError> {
            passes += 1;
            let r = self.pelt(values, normalized_penalty(series, multiplier))?;
            Ok(!r.changepoints.is_empty())
        };

        if !segments(0.0)? {
            return Ok(never(passes));
        }

        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut doublings = 0u32;
        while segments(hi)? {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings >= MAX_DOUBLINGS || !hi.is_finite() {
                return Err(ChangepointError::ThresholdDiverged);
            }
        }
        while hi - lo > margin {
            let mid = 0.5 * (lo + hi);
            // bracket already at adjacent floats
            if mid <= lo || mid >= hi {
                break;
            }
            if segments(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        Ok(ThresholdResult {
            multiplier: 0.5 * (lo + hi),
            margin,
            passes,
            doublings,
            never_segments: false,
        })
    }
}

/// How threshold multipliers are adjusted for document length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LengthScheme {
    Identity,
    DivideByLength,
    /// Per-document value passes through unchanged; the population is
    /// z-scored within length bins by [`normalize_thresholds`].
    #[default]
    BinnedZScore,
}

impl std::str::FromStr for LengthScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(Self::Identity),
            "divide_by_length" => Ok(Self::DivideByLength),
            "binned_z_score" | "binned_zscore" => Ok(Self::BinnedZScore),
            other => Err(format!("unknown length scheme `{other}`")),
        }
    }
}

pub fn normalize_threshold_for_length(
    multiplier: f64,
    length: usize,
    scheme: LengthScheme,
) -> Result<f64, ChangepointError> {
    if length == 0 {
        return Err(ChangepointError::ZeroLength);
    }
    Ok(match scheme {
        LengthScheme::Identity | LengthScheme::BinnedZScore => multiplier,
        LengthScheme::DivideByLength => multiplier / length as f64,
    })
}

/// Applies a length scheme to a whole population of thresholds.
pub fn normalize_thresholds(
    multipliers: &[f64],
    lengths: &[usize],
    scheme: LengthScheme,
    bins: usize,
) -> Result<Vec<f64>, ChangepointError> {
    if multipliers.len() != lengths.len() {
        return Err(ChangepointError::LengthMismatch(multipliers.len(), lengths.len()));
    }
    match scheme {
        LengthScheme::BinnedZScore => {
            let lens: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
            crate::stats::zscore_by_length_bins(&lens, multipliers, bins)
                .map_err(|e| ChangepointError::Normalization(e.to_string()))
        }
        _ => multipliers
            .iter()
            .zip(lengths)
            .map(|(&m, &l)| normalize_threshold_for_length(m, l, scheme))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::changepoint::Signal;

    fn step(n: usize) -> Vec<f64> {
        (0..2 * n).map(|i| if i < n { 0.0 } else { 10.0 }).collect()
    }

    #[test]
    fn penalty_scales_with_variance() {
        let s = Series::new(vec![0.0; 4], 1.5).unwrap();
        assert_eq!(normalized_penalty(&s, 2.0), 3.0);
        assert_eq!(normalized_penalty(&s, 0.0), 0.0);
        let w = [1.0, -2.0, 0.5, 3.0];
        let a = Series::from_word_odds(&w, Signal::Raw);
        let b = Series::from_word_odds(&w.map(|x| 3.0 * x), Signal::Raw);
        assert!((normalized_penalty(&b, 2.0) - 9.0 * normalized_penalty(&a, 2.0)).abs() < 1e-9);
    }

    #[test]
    fn constant_series_never_segments() {
        let s = Series::from_word_odds(&[0.7; 30], Signal::Raw);
        let r = Detector::new().threshold_search(&s).unwrap();
        assert_eq!(r.multiplier, 0.0);
        assert!(r.never_segments);
    }

    #[test]
    fn step_threshold_agrees_with_grid_scan() {
        let s = Series::from_word_odds(&step(20), Signal::Raw);
        let d = Detector::new();
        let r = d.threshold_search(&s).unwrap();
        assert!(!r.never_segments);

        // Grid oracle: locate the last multiplier (step 1e-3) that still
        // segments, scanning around the analytic scale of the step.
        let var = s.variance();
        let segments = |m: f64| !d.pelt(s.values(), m * var).unwrap().changepoints.is_empty();
        let mut lo = 0.0;
        let mut hi = 1.0;
        while segments(hi) {
            lo = hi;
            hi *= 2.0;
        }
        let mut transition = lo;
        let mut m = lo;
        while m <= hi {
            if segments(m) {
                transition = m;
            }
            m += 1e-3;
        }
        assert!(
            (transition - r.multiplier).abs() <= 1e-2 + 1e-3,
            "grid {transition} vs search {}",
            r.multiplier
        );
    }

    #[test]
    fn divide_by_length() {
        assert_eq!(
            normalize_threshold_for_length(4.0, 2000, LengthScheme::DivideByLength).unwrap(),
            0.002
        );
        assert_eq!(
            normalize_threshold_for_length(4.0, 2000, LengthScheme::Identity).unwrap(),
            4.0
        );
        assert!(normalize_threshold_for_length(4.0, 0, LengthScheme::Identity).is_err());
    }

    #[test]
    fn binned_scheme_standardizes_each_bin() {
        let lengths: Vec<usize> = (0..100).map(|i| 100 + i * 3).collect();
        let values: Vec<f64> = (0..100).map(|i| (i as f64).sin() * 5.0 + i as f64).collect();
        let out = normalize_thresholds(&values, &lengths, LengthScheme::BinnedZScore, 25).unwrap();
        // lengths are increasing, so bins are consecutive blocks of 4
        for chunk in out.chunks(4) {
            let mean = chunk.iter().sum::<f64>() / 4.0;
            let var = chunk.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
            assert!(mean.abs() < 1e-9);
            assert!((var.sqrt() - 1.0).abs() < 1e-9);
        }
    }
}
