use serde::{Deserialize, Serialize};

use super::StatsError;

pub const DEFAULT_BINS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BinStrategy {
    /// Equal-count bins over the length ranking.
    #[default]
    Quantile,
    /// Equal-width bins over the length range.
    EqualWidth,
}

impl std::str::FromStr for BinStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quantile" => Ok(Self::Quantile),
            "equal_width" => Ok(Self::EqualWidth),
            other => Err(format!("unknown bin strategy `{other}`")),
        }
    }
}

/// Assigns each point to a length bin. Every bin holds at least two points;
/// undersized bins are merged into a neighbour.
pub fn length_bins(
    lengths: &[f64],
    bins: usize,
    strategy: BinStrategy,
) -> Result<Vec<usize>, StatsError> {
    let n = lengths.len();
    if n < 2 {
        return Err(StatsError::TooFewPoints { needed: 2, got: n });
    }
    if lengths.iter().any(|l| !l.is_finite()) {
        return Err(StatsError::DegenerateSample("non-finite length".into()));
    }
    let bins = bins.max(1);
    let raw: Vec<usize> = match strategy {
        BinStrategy::Quantile => {
            let k = bins.min(n / 2);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| lengths[a].total_cmp(&lengths[b]).then(a.cmp(&b)));
            let mut out = vec![0; n];
            for (rank, &i) in order.iter().enumerate() {
                out[i] = rank * k / n;
            }
            out
        }
        BinStrategy::EqualWidth => {
            let lo = lengths.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = hi - lo;
            lengths
                .iter()
                .map(|&l| {
                    if width == 0.0 {
                        0
                    } else {
                        (((l - lo) / width * bins as f64) as usize).min(bins - 1)
                    }
                })
                .collect()
        }
    };
    Ok(merge_small_bins(&raw))
}

fn merge_small_bins(raw: &[usize]) -> Vec<usize> {
    let max = raw.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; max + 1];
    for &b in raw {
        counts[b] += 1;
    }
    // Walk bins in order, accumulating until a group holds at least two points.
    let mut relabel = vec![0usize; max + 1];
    let mut group = 0usize;
    let mut filled = 0usize;
    for b in 0..=max {
        relabel[b] = group;
        filled += counts[b];
        if filled >= 2 {
            group += 1;
            filled = 0;
        }
    }
    // A short tail folds into the previous group.
    if filled > 0 && group > 0 {
        for r in relabel.iter_mut() {
            if *r == group {
                *r = group - 1;
            }
        }
    }
    raw.iter().map(|&b| relabel[b]).collect()
}

/// Standardizes `values` within each bin of `assignment` (population sd).
/// Bins whose values are all equal map to zeros.
pub fn zscore_within_bins(values: &[f64], assignment: &[usize]) -> Result<Vec<f64>, StatsError> {
    if values.len() != assignment.len() {
        return Err(StatsError::LengthMismatch(values.len(), assignment.len()));
    }
    let k = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut sum = vec![0.0; k];
    let mut count = vec![0usize; k];
    for (&v, &b) in values.iter().zip(assignment) {
        sum[b] += v;
        count[b] += 1;
    }
    let means: Vec<f64> = sum
        .iter()
        .zip(&count)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let mut sq = vec![0.0; k];
    for (&v, &b) in values.iter().zip(assignment) {
        sq[b] += (v - means[b]) * (v - means[b]);
    }
    let sds: Vec<f64> = sq
        .iter()
        .zip(&count)
        .map(|(s, &c)| if c > 0 { (s / c as f64).sqrt() } else { 0.0 })
        .collect();
    Ok(values
        .iter()
        .zip(assignment)
        .map(|(&v, &b)| if sds[b] > 0.0 { (v - means[b]) / sds[b] } else { 0.0 })
        .collect())
}

/// Z-scores `values` within equal-count length bins, preserving input order.
pub fn zscore_by_length_bins(
    lengths: &[f64],
    values: &[f64],
    bins: usize,
) -> Result<Vec<f64>, StatsError> {
    zscore_by_length_bins_with(lengths, values, bins, BinStrategy::Quantile)
}

pub fn zscore_by_length_bins_with(
    lengths: &[f64],
    values: &[f64],
    bins: usize,
    strategy: BinStrategy,
) -> Result<Vec<f64>, StatsError> {
    if lengths.len() != values.len() {
        return Err(StatsError::LengthMismatch(lengths.len(), values.len()));
    }
    let assignment = length_bins(lengths, bins, strategy)?;
    zscore_within_bins(values, &assignment)
}
