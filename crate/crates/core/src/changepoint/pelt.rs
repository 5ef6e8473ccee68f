//! Penalised exact segmentation: PELT and the unpruned optimal-partitioning
//! recursion it accelerates.

use serde::{Deserialize, Serialize};

use super::cost::{CostModel, L2Cost, SegmentCost};
use super::ChangepointError;

/// Optimal segmentation of a series under a linear penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeltResult {
    /// Strictly increasing indices in `(0, n)`; each starts a new segment.
    pub changepoints: Vec<usize>,
    pub penalty: f64,
    /// Sum of segment costs plus `penalty * changepoints.len()`.
    pub cost_total: f64,
}

/// Configured changepoint detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detector {
    cost_model: CostModel,
    min_segment_length: usize,
}

impl Default for Detector {
    fn default() -> Self {
        Self::new()
    }
}

impl Detector {
    pub const fn new() -> Self {
        Self {
            cost_model: CostModel::L2,
            min_segment_length: 2,
        }
    }

    #[must_use]
    pub const fn with_cost_model(mut self, cost_model: CostModel) -> Self {
        self.cost_model = cost_model;
        self
    }

    /// Minimum number of points in every segment. Values below 1 are raised to 1.
    #[must_use]
    pub fn with_min_segment_length(mut self, min_segment_length: usize) -> Self {
        self.min_segment_length = min_segment_length.max(1);
        self
    }

    pub fn min_segment_length(&self) -> usize {
        self.min_segment_length
    }

    pub fn cost_model(&self) -> CostModel {
        self.cost_model
    }

    /// PELT search.
    pub fn pelt(&self, values: &[f64], penalty: f64) -> Result<PeltResult, ChangepointError> {
        self.check(values, penalty)?;
        match self.cost_model {
            CostModel::L2 => Ok(self.search(&L2Cost::new(values), penalty, true)),
        }
    }

    /// Same objective as [`Detector::pelt`] but every admissible last
    /// changepoint is scanned at every step. Quadratic; kept as an oracle.
    pub fn optimal_partitioning(
        &self,
        values: &[f64],
        penalty: f64,
    ) -> Result<PeltResult, ChangepointError> {
        self.check(values, penalty)?;
        match self.cost_model {
            CostModel::L2 => Ok(self.search(&L2Cost::new(values), penalty, false)),
        }
    }

    fn check(&self, values: &[f64], penalty: f64) -> Result<(), ChangepointError> {
        if values.len() < 2 * self.min_segment_length {
            return Err(ChangepointError::SeriesTooShort {
                len: values.len(),
                min_segment_length: self.min_segment_length,
            });
        }
        if !(penalty >= 0.0 && penalty.is_finite()) {
            return Err(ChangepointError::InvalidPenalty(penalty));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ChangepointError::NonFinite);
        }
        Ok(())
    }

    fn search<C: SegmentCost>(&self, cost: &C, penalty: f64, prune: bool) -> PeltResult {
        let n = cost.len();
        let m = self.min_segment_length;
        // best[t]: optimal objective for values[..t], counting penalties only
        // for changepoints strictly inside (0, t).
        let mut best = vec![f64::INFINITY; n + 1];
        let mut last = vec![0usize; n + 1];
        best[0] = 0.0;

        // (candidate, step at which it stops being admissible)
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        let mut scores: Vec<f64> = Vec::new();

        for t in m..=n {
            let fresh = t - m;
            if fresh == 0 || fresh >= m {
                candidates.push((fresh, usize::MAX));
            }
            candidates.retain(|&(_, dead_from)| t < dead_from);

            scores.clear();
            let mut min_score = f64::INFINITY;
            let mut arg = 0usize;
            for &(s, _) in &candidates {
                let entry = if s == 0 { 0.0 } else { best[s] + penalty };
                let score = entry + cost.cost(s, t);
                scores.push(score);
                if score < min_score {
                    min_score = score;
                    arg = s;
                }
            }
            best[t] = min_score;
            last[t] = arg;

            if prune {
                // A candidate that already loses to "changepoint at t" keeps
                // losing for every horizon T >= t + m, where t itself becomes
                // admissible.
                let bound = min_score + penalty;
                for (slot, &score) in candidates.iter_mut().zip(&scores) {
                    if slot.1 == usize::MAX {
                        let tol = 1e-9 * (1.0 + bound.abs().max(score.abs()));
                        if score > bound + tol {
                            slot.1 = t + m;
                        }
                    }
                }
            }
        }

        let mut changepoints = Vec::new();
        let mut s = last[n];
        while s > 0 {
            changepoints.push(s);
            s = last[s];
        }
        changepoints.reverse();

        let mut bounds = Vec::with_capacity(changepoints.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(&changepoints);
        bounds.push(n);
        let segment_costs: f64 = bounds.windows(2).map(|w| cost.cost(w[0], w[1])).sum();

        PeltResult {
            cost_total: segment_costs + penalty * changepoints.len() as f64,
            changepoints,
            penalty,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates every legal segmentation; only usable for tiny n.
    fn exhaustive(values: &[f64], penalty: f64, m: usize) -> (f64, Vec<usize>) {
        let n = values.len();
        let cost = L2Cost::new(values);
        let mut best = (f64::INFINITY, Vec::new());
        for mask in 0u32..(1 << (n - 1)) {
            let cps: Vec<usize> = (1..n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            let mut bounds = vec![0];
            bounds.extend(&cps);
            bounds.push(n);
            if bounds.windows(2).any(|w| w[1] - w[0] < m) {
                continue;
            }
            let total: f64 = bounds.windows(2).map(|w| cost.cost(w[0], w[1])).sum::<f64>()
                + penalty * cps.len() as f64;
            if total < best.0 - 1e-12 {
                best = (total, cps);
            }
        }
        best
    }

    #[test]
    fn constant_series_has_no_changepoints() {
        let d = Detector::new();
        let r = d.pelt(&[3.0; 40], 0.5).unwrap();
        assert!(r.changepoints.is_empty());
        assert_eq!(r.cost_total, 0.0);
    }

    #[test]
    fn step_series_splits_at_the_step() {
        let v = [0.0, 0.0, 0.0, 0.0, 0.0, 10.0, 10.0, 10.0, 10.0, 10.0];
        let (_, oracle) = exhaustive(&v, 1.0, 2);
        assert_eq!(oracle, vec![5]);
        let d = Detector::new();
        assert_eq!(d.pelt(&v, 1.0).unwrap().changepoints, vec![5]);
        assert!(d.pelt(&v, 1e6).unwrap().changepoints.is_empty());
    }

    #[test]
    fn zero_penalty_two_step_segments_flat_runs() {
        let v = [1.0, 1.0, 1.0, 1.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0];
        let (best, _) = exhaustive(&v, 0.0, 2);
        let r = Detector::new().optimal_partitioning(&v, 0.0).unwrap();
        assert_eq!(best, 0.0);
        assert_eq!(r.cost_total, 0.0);
        assert!(r.changepoints.contains(&4));
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let d = Detector::new();
        for _ in 0..200 {
            let n = rng.random_range(4..=12);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let penalty = 10f64.powf(rng.random_range(-2.0..1.0));
            let (obj, _) = exhaustive(&v, penalty, 2);
            let r = d.pelt(&v, penalty).unwrap();
            assert!((r.cost_total - obj).abs() < 1e-9, "{v:?} {penalty}");
        }
    }

    #[test]
    fn segments_respect_min_length() {
        let v: Vec<f64> = (0..30).map(|i| ((i * 7919) % 13) as f64).collect();
        for m in 1..5 {
            let r = Detector::new()
                .with_min_segment_length(m)
                .pelt(&v, 0.1)
                .unwrap();
            let mut bounds = vec![0];
            bounds.extend(&r.changepoints);
            bounds.push(v.len());
            assert!(bounds.windows(2).all(|w| w[1] - w[0] >= m));
        }
    }

    #[test]
    fn rejects_short_series_and_bad_penalty() {
        let d = Detector::new();
        assert!(matches!(
            d.pelt(&[1.0, 2.0, 3.0], 1.0),
            Err(ChangepointError::SeriesTooShort { .. })
        ));
        assert!(matches!(
            d.pelt(&[1.0; 8], -1.0),
            Err(ChangepointError::InvalidPenalty(_))
        ));
        assert!(matches!(
            d.pelt(&[1.0, f64::NAN, 1.0, 1.0], 1.0),
            Err(ChangepointError::NonFinite)
        ));
    }
}
