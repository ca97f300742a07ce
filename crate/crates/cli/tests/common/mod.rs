#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ibcolor::synthetic::{synthetic_observations, wcs_layout_palette, SyntheticLanguages};
use ibcolor::wcs::{palette_labs, write_chip_table, write_lab_table, write_term_file};
use ibcolor_cli::RunConfig;

pub const TOY_CHIPS: u32 = 12;

/// Twelve chips in row F.
pub fn toy_chip_table() -> String {
    let mut s = String::new();
    for i in 1..=TOY_CHIPS {
        let _ = writeln!(s, "{i}\tF\t{i}\tF{i}");
    }
    s
}

pub fn toy_lab_table() -> String {
    let mut s = String::from("#cnum\tV\tH\tL*\ta*\tb*\n");
    // uneven hue steps and a lightness ramp, so no two chips are equivalent
    let steps = [0, 1, 2, 1, 3, 1, 1, 2, 1, 3, 1, 2];
    let mut t = 0.0;
    for i in 1..=TOY_CHIPS {
        t += steps[i as usize - 1] as f64 * std::f64::consts::TAU / 19.0;
        let l = 40.0 + 3.0 * i as f64;
        let _ = writeln!(s, "{i}\t5\tF{i}\t{l:?}\t{:?}\t{:?}", 40.0 * t.cos(), 40.0 * t.sin());
    }
    s
}

fn name_by(s: &mut String, lang: u32, speakers: u32, term_of: impl Fn(u32, u32) -> String) {
    for sp in 1..=speakers {
        for c in 1..=TOY_CHIPS {
            let _ = writeln!(s, "{lang}\t{sp}\t{c}\t{}", term_of(sp, c));
        }
    }
}

/// Languages 1 and 2 (two and three terms) and 9 (one term per chip).
pub fn toy_terms() -> String {
    let mut s = String::new();
    name_by(&mut s, 1, 3, |_, c| if c <= 6 { "ka".into() } else { "po".into() });
    name_by(&mut s, 2, 3, |sp, c| {
        let t = match c {
            1..=4 => "ri",
            5..=8 => "mu",
            _ => "te",
        };
        if sp == 3 && c == 5 {
            "ri".into()
        } else {
            t.into()
        }
    });
    name_by(&mut s, 9, 1, |_, c| format!("c{c}"));
    s
}

/// Four terms, filed under a language id the CLI replaces with 111.
pub fn toy_english() -> String {
    let mut s = String::new();
    name_by(&mut s, 1, 2, |_, c| {
        ["red", "yellow", "green", "blue"][((c - 1) / 3) as usize].into()
    });
    s
}

pub struct Fixture {
    pub dir: PathBuf,
    pub chips: PathBuf,
    pub lab: PathBuf,
    pub terms: PathBuf,
    pub english: PathBuf,
}

pub fn write_toy(dir: &Path) -> Fixture {
    std::fs::create_dir_all(dir).unwrap();
    let f = Fixture {
        dir: dir.to_path_buf(),
        chips: dir.join("chip.txt"),
        lab: dir.join("lab.txt"),
        terms: dir.join("term.txt"),
        english: dir.join("english.txt"),
    };
    std::fs::write(&f.chips, toy_chip_table()).unwrap();
    std::fs::write(&f.lab, toy_lab_table()).unwrap();
    std::fs::write(&f.terms, toy_terms()).unwrap();
    std::fs::write(&f.english, toy_english()).unwrap();
    f
}

/// 330-chip survey-layout files with invented languages.
pub fn write_synthetic(dir: &Path, params: &SyntheticLanguages) -> Fixture {
    std::fs::create_dir_all(dir).unwrap();
    let palette = wcs_layout_palette();
    let obs = synthetic_observations(&palette, params);
    let f = Fixture {
        dir: dir.to_path_buf(),
        chips: dir.join("chip.txt"),
        lab: dir.join("lab.txt"),
        terms: dir.join("term.txt"),
        english: dir.join("english.txt"),
    };
    std::fs::write(&f.chips, write_chip_table(&palette)).unwrap();
    std::fs::write(&f.lab, write_lab_table(&palette_labs(&palette))).unwrap();
    std::fs::write(&f.terms, write_term_file(&obs)).unwrap();
    f
}

pub fn toy_config(f: &Fixture, out: &Path) -> RunConfig {
    RunConfig {
        chip_file: Some(f.chips.clone()),
        lab_file: Some(f.lab.clone()),
        term_file: Some(f.terms.clone()),
        english_file: Some(f.english.clone()),
        out_dir: out.to_path_buf(),
        beta_min: 1.0,
        beta_max: 4096.0,
        beta_steps: 120,
        rkk_steps: 60,
        rkk_restarts: 2,
        folds: 2,
        seed: 11,
        ..RunConfig::default()
    }
}
