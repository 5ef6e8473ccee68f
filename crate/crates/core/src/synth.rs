//! Deterministic synthetic papers for fixtures, examples and tests.
//!
//! Documents are written in a "human" register: mostly neutral academic words
//! with a per-document sprinkling of [`HUMAN_FLAVORED`] terms and a few
//! [`LLM_FLAVORED`] ones. Section layout mimics an extracted preprint.

use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::regen::wordlists::{HUMAN_FLAVORED, LLM_FLAVORED, NEUTRAL};

/// Word mix of one synthetic author.
#[derive(Debug, Clone, Copy)]
pub struct Register {
    pub human_rate: f64,
    pub llm_rate: f64,
}

impl Register {
    pub fn sample(rng: &mut impl Rng) -> Self {
        Self {
            human_rate: rng.random_range(0.05..0.10),
            llm_rate: rng.random_range(0.004..0.015),
        }
    }
}

fn capitalize(word: &str) -> String {
    let mut c = word.chars();
    match c.next() {
        Some(f) => f.to_ascii_uppercase().to_string() + c.as_str(),
        None => String::new(),
    }
}

pub fn sentence(rng: &mut impl Rng, register: Register) -> String {
    let n = rng.random_range(9..=20);
    let words: Vec<&str> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let list = if u < register.human_rate {
                HUMAN_FLAVORED
            } else if u < register.human_rate + register.llm_rate {
                LLM_FLAVORED
            } else {
                NEUTRAL
            };
            *list.choose(rng).expect("non-empty list")
        })
        .collect();
    let mut s = capitalize(words[0]);
    for w in &words[1..] {
        s.push(' ');
        s.push_str(w);
    }
    s.push('.');
    s
}

/// Sentences until the paragraph reaches `min_chars`.
pub fn paragraph(rng: &mut impl Rng, register: Register, min_chars: usize) -> String {
    let mut p = String::new();
    while p.chars().count() < min_chars {
        if !p.is_empty() {
            p.push(' ');
        }
        p.push_str(&sentence(rng, register));
    }
    p
}

fn paragraphs(rng: &mut impl Rng, register: Register, count: usize, min_each: usize) -> String {
    (0..count)
        .map(|_| paragraph(rng, register, min_each))
        .collect::<Vec<_>>()
        .join("\n\n")
}

/// Ways a synthetic paper can fail section detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Defect {
    MissingConclusion,
    ShortAbstract,
    ConclusionFirst,
}

/// A complete synthetic paper; `defect` breaks it deliberately.
pub fn paper(rng: &mut impl Rng, defect: Option<Defect>) -> String {
    let reg = Register::sample(rng);
    let abstract_len = if defect == Some(Defect::ShortAbstract) {
        250
    } else {
        rng.random_range(550..900)
    };
    let title = capitalize(NEUTRAL.choose(rng).unwrap())
        + " "
        + &capitalize(NEUTRAL.choose(rng).unwrap())
        + " for "
        + &capitalize(NEUTRAL.choose(rng).unwrap());
    let mut out = String::new();
    out.push_str(&format!("{title}\nA. Author and B. Author\n"));
    out.push_str(&format!(
        "arXiv:21{:02}.{:05}v1\n\n",
        rng.random_range(5..=9),
        rng.random_range(0..99999)
    ));
    out.push_str("Abstract\n");
    out.push_str(&paragraph(rng, reg, abstract_len));
    out.push_str("\nKeywords: changepoints, stylometry, text analysis\n\n");

    let intro = {
        let count = rng.random_range(2..=3);
        let mut s = paragraphs(rng, reg, count, 450);
        if rng.random_bool(0.5) {
            s.push_str(" Code is available at https://example.org/code for reference.");
        }
        s
    };
    let count = rng.random_range(1..=2);
    let conclusion = paragraphs(rng, reg, count, 600);

    if defect == Some(Defect::ConclusionFirst) {
        out.push_str(&format!("1 Conclusion\n{conclusion}\n\n2 Introduction\n{intro}\n\n"));
    } else {
        out.push_str(&format!("1 Introduction\n{intro}\n\n"));
    }
    for (i, h) in ["Related Work", "Method", "Experiments"].iter().enumerate() {
        out.push_str(&format!("{} {h}\n{}\n\n", i + 2, paragraph(rng, reg, 400)));
    }
    if defect.is_none() || defect == Some(Defect::ShortAbstract) {
        out.push_str(&format!("5 Conclusion\n{conclusion}\n\n"));
    }
    out.push_str("References\n[1] C. Author. A prior study. Journal of Studies 12 (2019) 1-10.\n");
    out
}

/// `(id, text)` pairs; ids are zero-padded so file order equals generation order.
pub fn corpus(n: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| (format!("doc{i:04}"), paper(&mut rng, None)))
        .collect()
}

/// Writes `valid` good papers and `invalid` defective ones as `<id>.txt`.
pub fn write_corpus(
    dir: &Path,
    valid: usize,
    invalid: usize,
    seed: u64,
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let defects = [Defect::MissingConclusion, Defect::ShortAbstract, Defect::ConclusionFirst];
    let mut paths = Vec::new();
    for i in 0..valid + invalid {
        let defect = (i >= valid).then(|| defects[(i - valid) % defects.len()]);
        let path = dir.join(format!("doc{i:04}.txt"));
        std::fs::write(&path, paper(&mut rng, defect))?;
        paths.push(path);
    }
    Ok(paths)
}
