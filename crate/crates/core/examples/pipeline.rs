//! prepare, train, segment, validate, analyze and report on the bundled
//! synthetic fixture, writing into a temporary directory.
//!
//! The same steps from a shell:
//!
//! ```text
//! F=crates/core/fixtures/synthetic
//! styleseg --config $F/styleseg.toml prepare $F/papers --out run/prep
//! styleseg --config $F/styleseg.toml train $F/train/human $F/train/llm --out run/train
//! styleseg --config $F/styleseg.toml segment run/train/model.tsv run/prep --out run/seg
//! styleseg --config $F/styleseg.toml validate run/train/model.tsv run/prep --out run/val
//! styleseg --config $F/styleseg.toml analyze run/seg/thresholds.csv --sections run/seg/section_scores.csv --out run/ana
//! styleseg report run/val run/ana --out run/report
//! ```

use std::path::Path;

use styleseg::config::RunConfig;
use styleseg::pipeline::{cmd_analyze, cmd_prepare, cmd_report, cmd_segment, cmd_train, cmd_validate};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic");
    let cfg = RunConfig::load(&fixture.join("styleseg.toml"))?;
    let tmp = tempfile::tempdir()?;
    let out = tmp.path();

    let prep = cmd_prepare(&cfg, &fixture.join("papers"), &out.join("prep"))?;
    println!("prepare: {} accepted, {} rejected", prep.accepted, prep.rejected);

    let trained = cmd_train(
        &cfg,
        &fixture.join("train/human"),
        &fixture.join("train/llm"),
        &out.join("train"),
    )?;
    println!("train: {} words", trained.vocabulary);

    let seg = cmd_segment(&cfg, &trained.model_path, &out.join("prep"), &out.join("seg"))?;
    println!("segment: {} documents scored", seg.scored);

    let val = cmd_validate(&cfg, &trained.model_path, &out.join("prep"), &out.join("val"))?;
    print!("{}", std::fs::read_to_string(out.join("val/tables.txt"))?);
    assert!(val.stats[0].means[2] > val.stats[0].means[0]);

    let ana = cmd_analyze(
        &cfg,
        &out.join("seg/thresholds.csv"),
        Some(&out.join("seg/section_scores.csv")),
        &out.join("ana"),
    )?;
    print!("{}", std::fs::read_to_string(out.join("ana/correlations.txt"))?);
    println!("section matrix over {} sections", ana.sections.map_or(0, |m| m.labels.len()));

    cmd_report(&cfg, &[out.join("val"), out.join("ana")], &out.join("report"))?;
    println!("report: {}", out.join("report/report.md").display());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
