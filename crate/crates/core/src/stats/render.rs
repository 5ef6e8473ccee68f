//! Plain-text table rendering.

use std::fmt::Write;

use super::{CorrelationMatrix, CorrelationRecord, GroupSummary, TTest};

pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

pub fn p_bucket(p: f64) -> &'static str {
    if p < 0.001 {
        "< 0.001"
    } else if p < 0.01 {
        "< 0.01"
    } else if p < 0.05 {
        "< 0.05"
    } else if p <= 0.2 {
        "> 0.05"
    } else {
        "> 0.2"
    }
}

pub fn render_summary_table(title: &str, rows: &[GroupSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{:<14} {:>10} {:>20} {:>6}", "Group", "Mean", "Standard Deviation", "n");
    for r in rows {
        let _ = writeln!(out, "{:<14} {:>10.4} {:>20.4} {:>6}", r.label, r.mean, r.sd, r.n);
    }
    out
}

pub fn render_ttest_table(title: &str, rows: &[(String, TTest)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{:<28} {:>12} {:>10}", "Comparison", "t-statistic", "p-value");
    for (label, t) in rows {
        let _ = writeln!(out, "{:<28} {:>12.3} {:>10}", label, t.t, p_bucket(t.p));
    }
    out
}

pub fn render_correlation_table(sections: &[(&str, Vec<CorrelationRecord>)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<44} {:>16} {:>10}", "Variable Pair", "Correlation (r)", "p-value");
    for (heading, rows) in sections {
        let _ = writeln!(out, "-- {heading} --");
        for r in rows {
            let label = format!("{} vs. {}", r.x, r.y);
            let _ = writeln!(out, "{:<44} {:>16.4} {:>10}", label, r.r, p_bucket(r.p));
        }
    }
    out
}

pub fn render_section_matrix(matrix: &CorrelationMatrix) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<14}", "Section");
    for l in &matrix.labels {
        let _ = write!(out, " {l:>14}");
    }
    out.push('\n');
    for (i, l) in matrix.labels.iter().enumerate() {
        let _ = write!(out, "{l:<14}");
        for j in 0..matrix.labels.len() {
            let c = matrix.get(i, j);
            let cell = if i == j {
                format!("{:.3}", c.r)
            } else {
                format!("{:.3}{}", c.r, significance_stars(c.p))
            };
            let _ = write!(out, " {cell:>14}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buckets() {
        assert_eq!(significance_stars(0.0004), "***");
        assert_eq!(significance_stars(0.004), "**");
        assert_eq!(significance_stars(0.04), "*");
        assert_eq!(significance_stars(0.4), "");
        assert_eq!(p_bucket(0.1), "> 0.05");
        assert_eq!(p_bucket(0.5), "> 0.2");
    }
}
