//! The cognitive source: per-language least-informative priors and their
//! average across languages.
//!
//! A language's prior is the capacity-achieving input distribution of its
//! naming channel q_l(w|c), found with Blahut–Arimoto:
//!
//! ```text
//! p(c) ← p(c) · exp(D[q(·|c) ‖ q(·)]) / Z        (D in nats)
//! ```
//!
//! The iteration stops when `max_c D_c − Σ_c p(c) D_c`, an upper bound on
//! the distance to capacity, drops below the tolerance.

use std::fmt::Write as _;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ib::Prior;
use crate::meaning_space::Palette;

pub const DEFAULT_CAPACITY_TOL: f64 = 1e-10;
pub const DEFAULT_CAPACITY_MAX_ITER: usize = 100_000;
/// Floor applied to source probabilities before they enter the IB objective.
pub const SOURCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguagePrior {
    pub language_id: u32,
    pub probs: Vec<f64>,
    /// Channel capacity in bits.
    pub capacity: f64,
    /// Final bound on the distance to capacity, bits.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl LanguagePrior {
    /// D[q(·|c) ‖ q(·)] per input, in bits, under this prior.
    pub fn divergences(&self, channel: &Array2<f64>) -> Vec<f64> {
        let p = Array1::from(self.probs.clone());
        let (d, _) = input_divergences(channel, &p);
        d.iter().map(|v| v / std::f64::consts::LN_2).collect()
    }
}

/// Returns D_c in nats and the output marginal.
fn input_divergences(channel: &Array2<f64>, p: &Array1<f64>) -> (Array1<f64>, Array1<f64>) {
    let qy = channel.t().dot(p);
    let d = channel
        .rows()
        .into_iter()
        .map(|row| {
            row.iter()
                .zip(&qy)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &q)| w * (w / q).ln())
                .sum::<f64>()
                .max(0.0)
        })
        .collect();
    (d, qy)
}

/// Capacity-achieving prior of `channel` (rows: inputs, columns: outputs).
pub fn reference_prior(language_id: u32, channel: &Array2<f64>, tol: f64, max_iter: usize) -> Result<LanguagePrior> {
    let (n, k) = channel.dim();
    if n == 0 || k == 0 {
        return Err(Error::Empty("channel"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    for (i, row) in channel.rows().into_iter().enumerate() {
        if row.iter().any(|&v| !(v >= 0.0)) || (row.sum() - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("channel row {i} is not a distribution")));
        }
    }
    let ln2 = std::f64::consts::LN_2;
    let mut p = Array1::from_elem(n, 1.0 / n as f64);
    let mut iterations = 0;
    let mut gap;
    let mut mi;
    loop {
        let (d, _) = input_divergences(channel, &p);
        mi = p.dot(&d);
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gap = (upper - mi).max(0.0) / ln2;
        if gap < tol || iterations >= max_iter {
            break;
        }
        // shift by the max exponent; only ratios matter
        let mut next: Array1<f64> = p.iter().zip(&d).map(|(&pc, &dc)| pc * (dc - upper).exp()).collect();
        let s = next.sum();
        next /= s;
        p = next;
        iterations += 1;
    }
    Ok(LanguagePrior {
        language_id,
        probs: p.to_vec(),
        capacity: mi / ln2,
        gap,
        iterations,
        converged: gap < tol,
    })
}

/// p(m) = (1/L) Σ_l p_l(m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CognitiveSource {
    pub probs: Vec<f64>,
    pub languages: Vec<u32>,
}

impl CognitiveSource {
    /// The source as an IB prior, with every entry floored at 1e-12.
    pub fn to_prior(&self) -> Result<Prior> {
        Prior::floored(&self.probs, SOURCE_FLOOR)
    }
}

/// Per-chip arithmetic mean, accumulated with Neumaier compensation.
pub fn average_source(priors: &[LanguagePrior]) -> Result<CognitiveSource> {
    let first = priors.first().ok_or(Error::Empty("prior list"))?;
    let n = first.probs.len();
    if priors.iter().any(|p| p.probs.len() != n) {
        return Err(Error::DimensionMismatch("priors over different chip sets".into()));
    }
    let count = priors.len() as f64;
    let probs = (0..n)
        .map(|c| neumaier_sum(priors.iter().map(|p| p.probs[c])) / count)
        .collect();
    Ok(CognitiveSource {
        probs,
        languages: priors.iter().map(|p| p.language_id).collect(),
    })
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Tab-separated table: one row per chip, one column per language.
pub fn priors_table(palette: &Palette, priors: &[LanguagePrior]) -> String {
    let mut s = String::from("chip_id");
    for p in priors {
        let _ = write!(s, "\t{}", p.language_id);
    }
    s.push('\n');
    for (c, chip) in palette.chips().iter().enumerate() {
        let _ = write!(s, "{}", chip.chip_id);
        for p in priors {
            let _ = write!(s, "\t{:.16e}", p.probs[c]);
        }
        s.push('\n');
    }
    s
}
