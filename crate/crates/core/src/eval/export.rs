//! Tab-separated exports: per-language score tables, the summary block,
//! and naming grids for contour plotting.

use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::crossval::{LanguageEval, PrincipleSummary};
use crate::ib::{Encoder, Prior};
use crate::meaning_space::{Lab, Palette};
use crate::wcs::mode_map;

fn num(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.10}"),
        None => "NA".into(),
    }
}

pub fn eval_table(entries: &[LanguageEval]) -> String {
    let mut s = String::from(
        "language_id\tfold\tbeta_ib\tcomplexity\taccuracy\teps_ib\teps_cib\teps_rkk\tgnid_ib\tgnid_cib\tgnid_rkk\tbeta_cib\trkk_terms\tflags\n",
    );
    for e in entries {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            e.language_id,
            e.fold,
            num(e.ib.as_ref().map(|f| f.beta)),
            num(e.ib.as_ref().or(e.cib.as_ref()).map(|f| f.complexity)),
            num(e.ib.as_ref().or(e.cib.as_ref()).map(|f| f.accuracy)),
            num(e.ib.as_ref().map(|f| f.epsilon)),
            num(e.cib.as_ref().map(|f| f.epsilon)),
            num(e.rkk.as_ref().map(|r| r.epsilon)),
            num(e.ib.as_ref().map(|f| f.gnid)),
            num(e.cib.as_ref().map(|f| f.gnid)),
            num(e.rkk.as_ref().map(|r| r.gnid)),
            num(e.cib.as_ref().map(|f| f.beta)),
            e.rkk.as_ref().map_or("NA".into(), |r| r.k.to_string()),
            if e.flags.is_empty() {
                "-".into()
            } else {
                e.flags.join("; ")
            },
        );
    }
    s
}

/// One row per principle, in the layout of the published summary table.
pub fn summary_table(summary: &[PrincipleSummary]) -> String {
    let mut s = String::from("principle\teps_mean\teps_sd\tgnid_mean\tgnid_sd\tn\texcluded\n");
    for p in summary {
        let _ = writeln!(
            s,
            "{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}",
            p.principle.label(),
            p.epsilon_mean,
            p.epsilon_sd,
            p.gnid_mean,
            p.gnid_sd,
            p.n,
            p.excluded
        );
    }
    s
}

/// Naming probabilities per chip: grid position, modal word, its
/// probability, then one column per word.
pub fn naming_grid(matrix: &Array2<f64>, palette: &Palette, words: &[String]) -> String {
    let modes = mode_map(matrix);
    let mut s = String::from("chip_id\trow\tcol\tmode\tmax_prob");
    for w in words {
        let _ = write!(s, "\t{w}");
    }
    s.push('\n');
    for (c, chip) in palette.chips().iter().enumerate() {
        let mode = modes.assignment[c];
        let _ = write!(
            s,
            "{}\t{}\t{}\t{}\t{:.10}",
            chip.chip_id,
            chip.grid.row,
            chip.grid.col,
            words[mode],
            matrix[[c, mode]]
        );
        for w in 0..words.len() {
            let _ = write!(s, "\t{:.10}", matrix[[c, w]]);
        }
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub word: String,
    pub weight: f64,
    pub lab: Lab,
    pub hex: String,
}

/// Color centroid of each category: Σ_c q(c|w) · lab(c).
pub fn category_centroids(encoder: &Encoder, prior: &Prior, palette: &Palette, words: &[String]) -> Vec<Centroid> {
    let post = encoder.posterior(prior);
    (0..encoder.n_words())
        .map(|w| {
            let mut lab = Lab::new(0.0, 0.0, 0.0);
            for (c, chip) in palette.chips().iter().enumerate() {
                let q = post[[c, w]];
                lab.l += q * chip.lab.l;
                lab.a += q * chip.lab.a;
                lab.b += q * chip.lab.b;
            }
            let [r, g, b] = lab.to_srgb8();
            Centroid {
                word: words[w].clone(),
                weight: encoder.word_marginal()[w],
                lab,
                hex: format!("#{r:02x}{g:02x}{b:02x}"),
            }
        })
        .collect()
}

pub fn centroid_table(centroids: &[Centroid]) -> String {
    let mut s = String::from("word\tweight\tL\ta\tb\thex\n");
    for c in centroids {
        let _ = writeln!(
            s,
            "{}\t{:.10}\t{:.6}\t{:.6}\t{:.6}\t{}",
            c.word, c.weight, c.lab.l, c.lab.a, c.lab.b, c.hex
        );
    }
    s
}
