//! Acceptance criteria, run in sequence so timings are not disturbed by
//! parallel tests. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ContinuousCDF, StudentsT};
use styleseg::changepoint::{optimal_partitioning, pelt, Series, Signal};
use styleseg::classifier::{build_profile, load_model, train};
use styleseg::config::RunConfig;
use styleseg::corpus::{prepare_document, Cleaner, CleaningRules, Criteria, RawDocument, TokenStream};
use styleseg::pipeline::{cmd_analyze, cmd_prepare, cmd_train, cmd_validate, measure};
use styleseg::regen::{inject_paragraph, MockProvider, ProviderConfig, DEFAULT_TARGET_FRACTION};
use styleseg::stats::{pearson, welch_t};
use styleseg::synth::corpus;

type Outcome = Result<String, String>;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic")
}

fn fixture_config() -> RunConfig {
    RunConfig::load(&fixture().join("styleseg.toml")).expect("fixture config loads")
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// 1. PELT agrees with optimal partitioning on 1000 random series.
fn pelt_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let start = Instant::now();
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = rng.random_range(8..=64);
        let mut values: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        for _ in 0..rng.random_range(0..4) {
            let at = rng.random_range(1..n);
            let shift = rng.random_range(-4.0..4.0);
            values[at..].iter_mut().for_each(|v| *v += shift);
        }
        let penalty = 10f64.powf(rng.random_range(-3.0..3.0));
        let s = Series::from_word_odds(&values, Signal::Raw);
        let a = pelt(&s, penalty, 2).map_err(|e| e.to_string())?;
        let b = optimal_partitioning(&s, penalty, 2).map_err(|e| e.to_string())?;
        if a.changepoints != b.changepoints {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        mismatches == 0 && elapsed < Duration::from_secs(10),
        format!("{mismatches} mismatches in 1000 series, {elapsed:.2?}"),
    )
}

/// 2. Threshold bracketing on 200 scored documents.
fn threshold_bracketing() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = fixture_config();
    let f = fixture();
    let trained = cmd_train(&cfg, &f.join("train/human"), &f.join("train/llm"), tmp.path()).map_err(|e| e.to_string())?;
    let model = load_model(&trained.model_path).map_err(|e| e.to_string())?;
    let criteria = Criteria::default();
    let cleaner = Cleaner::new(&CleaningRules::default()).map_err(|e| e.to_string())?;
    let provider = MockProvider::new(ProviderConfig::default(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    let mut failures = Vec::new();
    let mut max_passes = 0;
    for (i, (id, text)) in corpus(200, 2024).into_iter().enumerate() {
        let doc = prepare_document(&RawDocument::new(id.clone(), text).unwrap(), &criteria, &cleaner)
            .map_err(|e| e.to_string())?;
        let text = if i % 2 == 1 {
            inject_paragraph(&provider, &doc.combined, DEFAULT_TARGET_FRACTION, &mut rng)
                .map_err(|e| e.to_string())?
                .segmented
        } else {
            doc.combined
        };
        cfg.changepoint.signal = if i % 4 < 2 { Signal::Raw } else { Signal::CumSum };
        let m = measure(&cfg, &model, &id, &text).map_err(|e| e.to_string())?;
        let series = Series::from_word_odds(&m.scored.word_odds, cfg.changepoint.signal);
        let r = &m.threshold;
        let count = |mult: f64| pelt(&series, mult * series.variance(), 2).map(|p| p.changepoints.len());
        let above = count(r.multiplier + 0.01).map_err(|e| e.to_string())?;
        let below = count((r.multiplier - 0.01).max(0.0)).map_err(|e| e.to_string())?;
        let bracket_ok = above == 0 && (r.multiplier == 0.0 || below >= 1);
        let passes_ok = r.passes <= 2 * (r.doublings + 12);
        max_passes = max_passes.max(r.passes);
        if !bracket_ok || !passes_ok {
            failures.push(format!("{id}: M*={} above={above} below={below} passes={}", r.multiplier, r.passes));
        }
    }
    check(
        failures.is_empty(),
        format!("{} of 200 documents violate the bracket or pass bound (max passes {max_passes}) {failures:?}", failures.len()),
    )
}

/// 3. Segmented documents have the highest thresholds under the mock provider.
fn directional_replication() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (out, f) = (tmp.path(), fixture());
    let start = Instant::now();
    let mut cfg = fixture_config();
    let prep = cmd_prepare(&cfg, &f.join("papers"), &out.join("prep")).map_err(|e| e.to_string())?;
    let trained = cmd_train(&cfg, &f.join("train/human"), &f.join("train/llm"), &out.join("train")).map_err(|e| e.to_string())?;
    let val = cmd_validate(&cfg, &trained.model_path, &out.join("prep"), &out.join("val")).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let g = &val.stats[0];
    let [o, r, s] = g.means;
    let (s_vs_o, s_vs_r) = (g.tests[1], g.tests[2]);

    cfg.changepoint.signal = Signal::CumSum;
    if let Ok(alt) = cmd_validate(&cfg, &trained.model_path, &out.join("prep"), &out.join("val_cumsum")) {
        let [ao, ar, as_] = alt.stats[0].means;
        println!("     info: cumulative-sum signal gives means O {ao:.3}, R {ar:.3}, S {as_:.3}");
    }

    check(
        prep.accepted == 60
            && val.triples == 60
            && s > o
            && s > r
            && s_vs_o.p < 0.01
            && s_vs_r.p < 0.001
            && elapsed < Duration::from_secs(120),
        format!(
            "{} documents; means O {o:.3}, R {r:.3}, S {s:.3}; S vs O t={:.2} p={:.1e}; S vs R t={:.2} p={:.1e}; {elapsed:.2?}",
            val.triples, s_vs_o.t, s_vs_o.p, s_vs_r.t, s_vs_r.p
        ),
    )
}

/// 4. Model values follow the smoothed log-ratio formula.
fn classifier_fidelity() -> Outcome {
    const EPS: f64 = 1e-4;
    let ts = |w: &[&str]| -> TokenStream { w.iter().copied().collect() };
    let human = [ts(&["data", "data", "method"]), ts(&["because", "data"]), ts(&["method", "because", "because", "because"])];
    let llm = [ts(&["delve", "method"]), ts(&["data", "delve", "delve"]), ts(&["method"])];
    // mean rates per word, by hand
    let expected = [
        ("because", (0.0 + 0.5 + 0.75) / 3.0, 0.0),
        ("data", (2.0 / 3.0 + 0.5) / 3.0, (1.0 / 3.0) / 3.0),
        ("delve", 0.0, (0.5 + 2.0 / 3.0) / 3.0),
        ("method", (1.0 / 3.0 + 0.25) / 3.0, (0.5 + 1.0) / 3.0),
    ];
    let (hp, lp) = (build_profile(&human).unwrap(), build_profile(&llm).unwrap());
    let model = train(&hp, &lp);
    let worst = expected
        .iter()
        .map(|(w, h, l)| (model.get(w) - ((l + EPS) / (h + EPS)).ln()).abs())
        .fold(0.0, f64::max);
    let swapped = train(&lp, &hp);
    let antisymmetric = model.iter().all(|(w, v)| swapped.get(w) == -v) && model.len() == swapped.len();

    let bound = ((1.0 + EPS) / EPS).ln();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut peak = 0.0f64;
    for _ in 0..200 {
        let mut random_corpus = || -> Vec<TokenStream> {
            (0..rng.random_range(1..6))
                .map(|_| (0..rng.random_range(1..30)).map(|_| format!("w{}", rng.random_range(0..20))).collect())
                .collect()
        };
        let (a, b) = (random_corpus(), random_corpus());
        let m = train(&build_profile(&a).unwrap(), &build_profile(&b).unwrap());
        peak = m.iter().map(|(_, v)| v.abs()).fold(peak, f64::max);
    }
    check(
        worst < 1e-12 && antisymmetric && peak <= bound,
        format!("max formula error {worst:.1e}; antisymmetric {antisymmetric}; max |log-odds| {peak:.4} <= {bound:.4}"),
    )
}

/// 5. Binned z-scoring removes a built-in length dependence.
fn length_confound() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut csv = String::from("id,length,total,threshold_multiplier\n");
    for i in 0..2400 {
        let length = rng.random_range(200..4000) as f64;
        let total = -0.002 * length + 2.0 * noise.sample(&mut rng);
        let threshold = 5.0 + 0.003 * length + 3.0 * noise.sample(&mut rng);
        csv.push_str(&format!("d{i:04},{length},{total},{threshold}\n"));
    }
    let scores = tmp.path().join("scores.csv");
    std::fs::write(&scores, csv).map_err(|e| e.to_string())?;
    let a = cmd_analyze(&fixture_config(), &scores, None, &tmp.path().join("ana")).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut detail = Vec::new();
    for i in 0..2 {
        let (raw, norm) = (&a.raw[i], &a.normalized[i]);
        ok &= raw.r.abs() >= 0.5 && raw.p < 0.001 && norm.r.abs() < 0.05 && norm.p > 0.05;
        detail.push(format!(
            "{}-{}: raw r={:.3} p={:.1e}, z r={:.4} p={:.2}",
            raw.x, raw.y, raw.r, raw.p, norm.r, norm.p
        ));
    }
    check(ok, detail.join("; "))
}

/// 6. Welch and Pearson agree with an independent implementation.
fn statistics_correctness() -> Outcome {
    let two_sided = |t: f64, df: f64| 2.0 * StudentsT::new(0.0, 1.0, df).unwrap().cdf(-t.abs());
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let var = |x: &[f64]| {
        let m = mean(x);
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut worst = 0.0f64;
    let mut affine = 0.0f64;
    for _ in 0..50 {
        let (na, nb) = (rng.random_range(3..80), rng.random_range(3..80));
        let sa = rng.random_range(0.1..4.0);
        let shift = rng.random_range(-1.5..1.5);
        let a: Vec<f64> = (0..na).map(|_| sa * normal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..nb).map(|_| shift + normal.sample(&mut rng)).collect();
        let (va, vb) = (var(&a) / na as f64, var(&b) / nb as f64);
        let t = (mean(&a) - mean(&b)) / (va + vb).sqrt();
        let df = (va + vb).powi(2) / (va * va / (na - 1) as f64 + vb * vb / (nb - 1) as f64);
        let w = welch_t(&a, &b).map_err(|e| e.to_string())?;
        worst = worst.max((w.t - t).abs()).max((w.df - df).abs()).max((w.p - two_sided(t, df)).abs());
    }
    for _ in 0..50 {
        let n = rng.random_range(5..300);
        let slope = rng.random_range(-1.0..1.0);
        let x: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let y: Vec<f64> = x.iter().map(|v| slope * v + normal.sample(&mut rng)).collect();
        let nf = n as f64;
        let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        let r = (nf * sxy - sx * sy) / ((nf * sxx - sx * sx) * (nf * syy - sy * sy)).sqrt();
        let p = two_sided(r * ((nf - 2.0) / (1.0 - r * r)).sqrt(), nf - 2.0);
        let c = pearson(&x, &y).map_err(|e| e.to_string())?;
        worst = worst.max((c.r - r).abs()).max((c.p - p).abs());

        let (k, d) = (rng.random_range(0.1..10.0), rng.random_range(-50.0..50.0));
        let x2: Vec<f64> = x.iter().map(|v| k * v + d).collect();
        let y2: Vec<f64> = y.iter().map(|v| -k * v + d).collect();
        affine = affine
            .max((pearson(&x2, &y).unwrap().r - c.r).abs())
            .max((pearson(&x, &y2).unwrap().r + c.r).abs());
    }
    check(
        worst < 1e-9 && affine < 1e-12,
        format!("max deviation from reference {worst:.1e}; affine deviation {affine:.1e}"),
    )
}

/// 7. PELT time grows about linearly on noise.
///
/// Penalty is the series variance (multiplier 1), the same penalty the
/// pipeline reports changepoints at.
fn pelt_scaling() -> Outcome {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut points = Vec::new();
    for n in [1_000usize, 10_000, 100_000] {
        let values: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        let s = Series::from_word_odds(&values, Signal::Raw);
        let reps = 200_000 / n;
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = Instant::now();
            for _ in 0..reps {
                std::hint::black_box(pelt(&s, s.variance(), 2).unwrap());
            }
            best = best.min(start.elapsed().as_secs_f64() / reps as f64);
        }
        points.push(((n as f64).ln(), best.ln()));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = points.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / points.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    let times: Vec<String> = points.iter().map(|(_, y)| format!("{:.2e}s", y.exp())).collect();
    check(slope <= 1.3, format!("log-log slope {slope:.3} (times {})", times.join(", ")))
}

fn copy_dir(from: &Path, to: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(to)?;
    for e in std::fs::read_dir(from)? {
        let p = e?.path();
        let target = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_dir(&p, &target)?;
        } else {
            std::fs::copy(&p, &target)?;
        }
    }
    Ok(())
}

fn tree(dir: &Path) -> std::io::Result<Vec<(PathBuf, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d)? {
            let p = e?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p)?));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// 8. Two runs of the chain produce identical bytes.
fn reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let steps: [&[&str]; 5] = [
        &["prepare", "fx/papers", "--out", "run/prep"],
        &["train", "fx/train/human", "fx/train/llm", "--out", "run/train"],
        &["segment", "run/train/model.tsv", "run/prep", "--out", "run/seg"],
        &["validate", "run/train/model.tsv", "run/prep", "--out", "run/val"],
        &["analyze", "run/seg/thresholds.csv", "--sections", "run/seg/section_scores.csv", "--out", "run/ana"],
    ];
    let start = Instant::now();
    let mut trees = Vec::new();
    for name in ["first", "second"] {
        let cwd = tmp.path().join(name);
        copy_dir(&fixture(), &cwd.join("fx")).map_err(|e| e.to_string())?;
        for args in steps {
            let o = Command::new(env!("CARGO_BIN_EXE_styleseg"))
                .current_dir(&cwd)
                .args(["--config", "fx/styleseg.toml", "--seed", "42"])
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            if !o.status.success() {
                return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&o.stderr)));
            }
        }
        trees.push(tree(&cwd.join("run")).map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed();
    let differing: Vec<_> = trees[0]
        .iter()
        .zip(&trees[1])
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.display().to_string())
        .collect();
    let same = trees[0].len() == trees[1].len() && differing.is_empty();
    check(
        same && elapsed < Duration::from_secs(60),
        format!("{} files compared, differing {differing:?}, two runs in {elapsed:.2?}", trees[0].len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 PELT exactness", pelt_exactness),
        ("2 threshold bracketing", threshold_bracketing),
        ("3 directional replication", directional_replication),
        ("4 classifier formula fidelity", classifier_fidelity),
        ("5 length confound removal", length_confound),
        ("6 statistics correctness", statistics_correctness),
        ("7 PELT scaling", pelt_scaling),
        ("8 end-to-end reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
