//! Segment cost models.

use serde::{Deserialize, Serialize};

use super::ChangepointError;

/// Cost model selector, as named in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CostModel {
    /// Sum of squared deviations from the segment mean.
    #[default]
    L2,
}

impl std::str::FromStr for CostModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(CostModel::L2),
            other => Err(format!("unknown cost model `{other}`")),
        }
    }
}

/// Cost of the half-open segment `values[start..end]`.
///
/// Implementations must satisfy `cost(a, b) + cost(b, c) <= cost(a, c)`
/// (up to rounding), which is what makes PELT pruning exact.
pub trait SegmentCost {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cost(&self, start: usize, end: usize) -> f64;
}

/// L2 change-in-mean cost backed by prefix sums.
///
/// Values are centred on their global mean before accumulation so that
/// long drifting series (cumulative sums) keep their precision.
#[derive(Debug, Clone)]
pub struct L2Cost {
    sums: Vec<f64>,
    squares: Vec<f64>,
}

impl L2Cost {
    pub fn new(values: &[f64]) -> Self {
        let n = values.len();
        let centre = if n == 0 {
            0.0
        } else {
            values.iter().sum::<f64>() / n as f64
        };
        let mut sums = Vec::with_capacity(n + 1);
        let mut squares = Vec::with_capacity(n + 1);
        let (mut s, mut q) = (0.0, 0.0);
        sums.push(s);
        squares.push(q);
        for &v in values {
            let d = v - centre;
            s += d;
            q += d * d;
            sums.push(s);
            squares.push(q);
        }
        Self { sums, squares }
    }
}

impl SegmentCost for L2Cost {
    fn len(&self) -> usize {
        self.sums.len() - 1
    }

    #[inline]
    fn cost(&self, start: usize, end: usize) -> f64 {
        debug_assert!(start < end && end <= self.len());
        let s = self.sums[end] - self.sums[start];
        let q = self.squares[end] - self.squares[start];
        (q - s * s / (end - start) as f64).max(0.0)
    }
}

/// L2 cost of the inclusive segment `values[i..=j]`, evaluated directly.
pub fn segment_cost(values: &[f64], i: usize, j: usize) -> Result<f64, ChangepointError> {
    if i > j || j >= values.len() {
        return Err(ChangepointError::IndexOutOfRange {
            start: i,
            end: j,
            len: values.len(),
        });
    }
    let seg = &values[i..=j];
    let mean = seg.iter().sum::<f64>() / seg.len() as f64;
    Ok(seg.iter().map(|v| (v - mean) * (v - mean)).sum())
}
