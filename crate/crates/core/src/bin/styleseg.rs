use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use styleseg::config::RunConfig;
use styleseg::pipeline::{self, FixtureSpec, PipelineError};

/// Word log-odds scoring and PELT-based stylistic segmentation of papers.
///
/// Any config key can also be given as `--section.key value`.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (config key `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Config override `key=value`, e.g. `changepoint.margin=0.02`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect and clean sections of raw `*.txt` papers.
    Prepare { input: Option<PathBuf> },
    /// Train the log-odds model from human and LLM corpora.
    Train {
        human: Option<PathBuf>,
        llm: Option<PathBuf>,
    },
    /// Score documents and search their threshold multipliers.
    Segment {
        model: Option<PathBuf>,
        corpus: Option<PathBuf>,
    },
    /// Compare original, regenerated and segmented versions of a corpus.
    Validate {
        model: Option<PathBuf>,
        corpus: Option<PathBuf>,
    },
    /// Length-confound correlations and the section matrix.
    Analyze {
        scores: Option<PathBuf>,
        #[arg(long)]
        sections: Option<PathBuf>,
    },
    /// Gather tables and charts of earlier runs into one report.
    Report {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
    /// Rewrite a corpus with the configured provider.
    Regenerate { corpus: Option<PathBuf> },
    /// Write a synthetic fixture corpus.
    Fixture {
        #[arg(long, default_value_t = FixtureSpec::default().papers)]
        papers: usize,
        #[arg(long, default_value_t = FixtureSpec::default().defective)]
        defective: usize,
        #[arg(long, default_value_t = FixtureSpec::default().train)]
        train: usize,
    },
}

/// Turns `--a.b=v` and `--a.b v` into `--set a.b=v`.
fn expand_dotted(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter().peekable();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            out.push(arg);
            continue;
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (flag.to_string(), None),
        };
        if !key.contains('.') {
            out.push(arg);
            continue;
        }
        let value = value.or_else(|| it.next()).unwrap_or_default();
        out.push("--set".into());
        out.push(format!("{key}={value}"));
    }
    out
}

fn need(arg: Option<PathBuf>, fallback: &Option<PathBuf>, name: &str) -> Result<PathBuf, PipelineError> {
    arg.or_else(|| fallback.clone())
        .ok_or_else(|| PipelineError::Usage(format!("missing {name} (argument or paths.{name})")))
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply_overrides(&cli.overrides)?;
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    let out: &Path = &cfg.out.clone();
    let p = cfg.paths.clone();
    match cli.command {
        Command::Prepare { input } => {
            let s = pipeline::cmd_prepare(&cfg, &need(input, &p.input, "input")?, out)?;
            println!("accepted {} rejected {}", s.accepted, s.rejected);
        }
        Command::Train { human, llm } => {
            let human = need(human, &p.human, "human")?;
            let llm = need(llm, &p.llm, "llm")?;
            let s = pipeline::cmd_train(&cfg, &human, &llm, out)?;
            println!(
                "model {} ({} words, {} human / {} llm docs)",
                s.model_path.display(),
                s.vocabulary,
                s.human_docs,
                s.llm_docs
            );
        }
        Command::Segment { model, corpus } => {
            let model = need(model, &p.model, "model")?;
            let corpus = need(corpus, &p.corpus, "corpus")?;
            let s = pipeline::cmd_segment(&cfg, &model, &corpus, out)?;
            println!(
                "scored {} skipped {} never-segmenting {}",
                s.scored, s.skipped, s.never_segments
            );
        }
        Command::Validate { model, corpus } => {
            let model = need(model, &p.model, "model")?;
            let corpus = need(corpus, &p.corpus, "corpus")?;
            let s = pipeline::cmd_validate(&cfg, &model, &corpus, out)?;
            println!("triples {} skipped {}", s.triples, s.skipped);
            for g in &s.stats {
                println!(
                    "{}: original {:.4} regenerated {:.4} segmented {:.4}",
                    g.metric, g.means[0], g.means[1], g.means[2]
                );
            }
        }
        Command::Analyze { scores, sections } => {
            let scores = need(scores, &p.scores, "scores")?;
            let sections = sections.or(p.section_scores);
            let s = pipeline::cmd_analyze(&cfg, &scores, sections.as_deref(), out)?;
            for (kind, recs) in [("raw", &s.raw), ("z-scored", &s.normalized)] {
                for c in recs {
                    println!("{kind} {} vs {}: r={:.4} p={:.3e}", c.x, c.y, c.r, c.p);
                }
            }
        }
        Command::Report { runs } => {
            let n = pipeline::cmd_report(&cfg, &runs, out)?;
            println!("report with {n} items in {}", out.display());
        }
        Command::Regenerate { corpus } => {
            let corpus = need(corpus, &p.corpus, "corpus")?;
            let (done, skipped) = pipeline::cmd_regenerate(&cfg, &corpus, out)?;
            println!("regenerated {done} skipped {skipped}");
        }
        Command::Fixture {
            papers,
            defective,
            train,
        } => {
            let spec = FixtureSpec {
                papers,
                defective,
                train,
                seed: cfg.seed,
            };
            pipeline::cmd_fixture(spec, out)?;
            println!("fixture written to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse_from(expand_dotted(std::env::args())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
