//! Group summaries, two-sample t tests, Pearson correlation and length-binned
//! z-score normalization.

mod dist;
mod render;
mod zscore;

use serde::{Deserialize, Serialize};

pub use dist::{incomplete_beta, ln_gamma, student_t_two_sided};
pub use render::{
    p_bucket, render_correlation_table, render_section_matrix, render_summary_table,
    render_ttest_table, significance_stars,
};
pub use zscore::{
    length_bins, zscore_by_length_bins, zscore_by_length_bins_with, zscore_within_bins,
    BinStrategy, DEFAULT_BINS,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("alignment error: {0}")]
    AlignmentError(String),
}

/// Result of a two-sample t test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    /// Two-sided.
    pub p: f64,
    pub df: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TTestKind {
    #[default]
    Welch,
    /// Pooled-variance Student test.
    Student,
}

impl std::str::FromStr for TTestKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "welch" => Ok(Self::Welch),
            "student" => Ok(Self::Student),
            other => Err(format!("unknown t test `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub sd: f64,
    pub n: usize,
    /// True when `n == 1` and the sd is undefined.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub x: String,
    pub y: String,
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with n - 1 denominator.
fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

fn check_sample(xs: &[f64], name: &str) -> Result<f64, StatsError> {
    if xs.len() < 2 {
        return Err(StatsError::DegenerateSample(format!(
            "{name} has {} observation(s)",
            xs.len()
        )));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::DegenerateSample(format!("{name} has non-finite values")));
    }
    let v = sample_variance(xs);
    if v == 0.0 {
        return Err(StatsError::DegenerateSample(format!("{name} has zero variance")));
    }
    Ok(v)
}

/// Welch's unequal-variance t test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TTest, StatsError> {
    let va = check_sample(a, "first sample")?;
    let vb = check_sample(b, "second sample")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (qa, qb) = (va / na, vb / nb);
    let t = (mean(a) - mean(b)) / (qa + qb).sqrt();
    let df = (qa + qb).powi(2) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    Ok(TTest {
        t,
        p: student_t_two_sided(t, df),
        df,
    })
}

/// Pooled-variance two-sample t test.
pub fn student_t(a: &[f64], b: &[f64]) -> Result<TTest, StatsError> {
    let va = check_sample(a, "first sample")?;
    let vb = check_sample(b, "second sample")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
    let t = (mean(a) - mean(b)) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(TTest {
        t,
        p: student_t_two_sided(t, df),
        df,
    })
}

pub fn t_test(kind: TTestKind, a: &[f64], b: &[f64]) -> Result<TTest, StatsError> {
    match kind {
        TTestKind::Welch => welch_t(a, b),
        TTestKind::Student => student_t(a, b),
    }
}

/// Product-moment correlation with a two-sided p-value from the
/// `r * sqrt((n - 2) / (1 - r^2))` t transform.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationRecord, StatsError> {
    pearson_labeled(x, y, "x", "y")
}

pub fn pearson_labeled(
    x: &[f64],
    y: &[f64],
    x_label: &str,
    y_label: &str,
) -> Result<CorrelationRecord, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewPoints {
            needed: 3,
            got: x.len(),
        });
    }
    check_sample(x, x_label)?;
    check_sample(y, y_label)?;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let n = x.len();
    let p = if r.abs() == 1.0 {
        0.0
    } else {
        let df = (n - 2) as f64;
        student_t_two_sided(r * (df / (1.0 - r * r)).sqrt(), df)
    };
    Ok(CorrelationRecord {
        x: x_label.to_string(),
        y: y_label.to_string(),
        r,
        p,
        n,
    })
}

/// Mean and sample sd per labelled group. Empty groups are skipped.
pub fn group_summaries<S: AsRef<str>>(groups: &[(S, Vec<f64>)]) -> Vec<GroupSummary> {
    groups
        .iter()
        .filter(|(_, xs)| !xs.is_empty())
        .map(|(label, xs)| {
            let n = xs.len();
            GroupSummary {
                label: label.as_ref().to_string(),
                mean: mean(xs),
                sd: if n > 1 { sample_variance(xs).sqrt() } else { 0.0 },
                n,
                degenerate: n == 1,
            }
        })
        .collect()
}

/// Pairwise correlation between labelled per-document scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<CorrelationRecord>>,
}

impl CorrelationMatrix {
    pub fn get(&self, i: usize, j: usize) -> &CorrelationRecord {
        &self.cells[i][j]
    }
}

/// Correlates every pair of sections over the documents present in both.
///
/// Each section is a list of `(document id, score)`. Duplicate ids within a
/// section, or fewer than three shared documents for a pair, are alignment
/// errors.
pub fn section_correlation_matrix(
    sections: &[(String, Vec<(String, f64)>)],
) -> Result<CorrelationMatrix, StatsError> {
    use std::collections::BTreeMap;

    let mut maps = Vec::with_capacity(sections.len());
    for (label, rows) in sections {
        let mut map = BTreeMap::new();
        for (id, v) in rows {
            if map.insert(id.as_str(), *v).is_some() {
                return Err(StatsError::AlignmentError(format!(
                    "document `{id}` appears twice in section `{label}`"
                )));
            }
        }
        maps.push(map);
    }

    let k = sections.len();
    let mut cells: Vec<Vec<Option<CorrelationRecord>>> = vec![vec![None; k]; k];
    for i in 0..k {
        let label = &sections[i].0;
        cells[i][i] = Some(CorrelationRecord {
            x: label.clone(),
            y: label.clone(),
            r: 1.0,
            p: 0.0,
            n: maps[i].len(),
        });
        for j in i + 1..k {
            let (xs, ys): (Vec<f64>, Vec<f64>) = maps[i]
                .iter()
                .filter_map(|(id, x)| maps[j].get(id).map(|y| (*x, *y)))
                .unzip();
            if xs.len() < 3 {
                return Err(StatsError::AlignmentError(format!(
                    "sections `{}` and `{}` share only {} document(s)",
                    label,
                    sections[j].0,
                    xs.len()
                )));
            }
            let rec = pearson_labeled(&xs, &ys, label, &sections[j].0)?;
            let mirrored = CorrelationRecord {
                x: rec.y.clone(),
                y: rec.x.clone(),
                ..rec.clone()
            };
            cells[i][j] = Some(rec);
            cells[j][i] = Some(mirrored);
        }
    }
    Ok(CorrelationMatrix {
        labels: sections.iter().map(|(l, _)| l.clone()).collect(),
        cells: cells
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.expect("filled")).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 3.5, 4.0];
        let r = welch_t(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn welch_known_case() {
        // a = 1..5, b = 2..6: equal variances 2.5, t = -1/sqrt(1) = -1, df = 8
        let r = welch_t(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((r.t + 1.0).abs() < 1e-12);
        assert!((r.df - 8.0).abs() < 1e-12);
        let s = welch_t(&[2.0, 3.0, 4.0, 5.0, 6.0], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.t, -r.t);
        assert_eq!(s.p, r.p);
    }

    #[test]
    fn degenerate_samples_rejected() {
        assert!(matches!(
            welch_t(&[1.0], &[1.0, 2.0]),
            Err(StatsError::DegenerateSample(_))
        ));
        assert!(matches!(
            welch_t(&[3.0, 3.0, 3.0], &[1.0, 2.0]),
            Err(StatsError::DegenerateSample(_))
        ));
    }

    #[test]
    fn student_equals_welch_for_balanced_equal_variance() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 3.0, 4.0, 5.0, 6.0];
        let w = welch_t(&a, &b).unwrap();
        let s = student_t(&a, &b).unwrap();
        assert!((w.t - s.t).abs() < 1e-12 && (w.p - s.p).abs() < 1e-12);
    }

    #[test]
    fn perfect_correlations() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.7).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        assert!((pearson(&x, &y).unwrap().r - 1.0).abs() < 1e-12);
        let z: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &z).unwrap().r + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(StatsError::LengthMismatch(3, 2))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatsError::TooFewPoints { .. })
        ));
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::DegenerateSample(_))
        ));
    }

    #[test]
    fn summaries() {
        let s = group_summaries(&[("pair", vec![2.0, 4.0]), ("one", vec![7.0])]);
        assert_eq!(s[0].mean, 3.0);
        assert!((s[0].sd - 2f64.sqrt()).abs() < 1e-15);
        assert!(!s[0].degenerate);
        assert_eq!(s[1].sd, 0.0);
        assert!(s[1].degenerate);
    }

    #[test]
    fn matrix_shape_and_symmetry() {
        let ids: Vec<String> = (0..6).map(|i| format!("d{i}")).collect();
        let sec = |f: fn(f64) -> f64| -> Vec<(String, f64)> {
            ids.iter().enumerate().map(|(i, id)| (id.clone(), f(i as f64))).collect()
        };
        let sections = vec![
            ("a".to_string(), sec(|x| x)),
            ("b".to_string(), sec(|x| x * x)),
            ("c".to_string(), sec(|x| (x * 1.3).sin())),
        ];
        let m = section_correlation_matrix(&sections).unwrap();
        for i in 0..3 {
            assert_eq!(m.get(i, i).r, 1.0);
            for j in 0..3 {
                assert_eq!(m.get(i, j).r, m.get(j, i).r);
            }
        }
    }

    #[test]
    fn matrix_alignment_errors() {
        let dup = vec![
            ("a".to_string(), vec![("x".to_string(), 1.0), ("x".to_string(), 2.0)]),
            ("b".to_string(), vec![("x".to_string(), 1.0)]),
        ];
        assert!(matches!(
            section_correlation_matrix(&dup),
            Err(StatsError::AlignmentError(_))
        ));
        let disjoint = vec![
            ("a".to_string(), vec![("x".to_string(), 1.0), ("y".to_string(), 2.0)]),
            ("b".to_string(), vec![("z".to_string(), 1.0), ("w".to_string(), 2.0)]),
        ];
        assert!(section_correlation_matrix(&disjoint).is_err());
    }
}
