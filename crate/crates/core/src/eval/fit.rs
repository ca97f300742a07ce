use serde::{Deserialize, Serialize};

use super::gnid::gnid_or_identical;
use crate::error::{Error, Result};
use crate::ib::{ib_objective, Encoder, IBCurve, Prior};
use crate::meaning_space::MeaningSpace;

/// Slack when locating a complexity inside the curve's range.
const RANGE_SLACK: f64 = 1e-9;

/// A language scored against one IB curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageFit {
    pub language_id: u32,
    pub beta: f64,
    /// F_β[q_l] − F*_β.
    pub delta_f: f64,
    pub epsilon: f64,
    pub gnid: f64,
    /// Curve point whose encoder the language is compared with.
    pub point: usize,
    /// I(M;W) of the language, bits.
    pub complexity: f64,
    /// I(Y;W) of the language, bits.
    pub accuracy: f64,
}

/// β_l = argmin over the curve grid of
/// ΔF_β = (I_l − I*_β) − β (A_l − A*_β); ties go to the lowest β.
pub fn fit_beta(
    language_id: u32,
    language: &Encoder,
    curve: &IBCurve,
    prior: &Prior,
    space: &MeaningSpace,
) -> Result<LanguageFit> {
    if curve.points.is_empty() {
        return Err(Error::Empty("curve"));
    }
    let own = ib_objective(language, prior, space, 0.0)?;
    let (il, al) = (own.complexity, own.accuracy);
    let mut best = 0;
    let mut best_df = f64::INFINITY;
    for (i, p) in curve.points.iter().enumerate() {
        let df = (il - p.complexity) - p.beta * (al - p.accuracy);
        if df < best_df {
            best_df = df;
            best = i;
        }
    }
    let beta = curve.points[best].beta;
    Ok(LanguageFit {
        language_id,
        beta,
        delta_f: best_df,
        epsilon: best_df / beta,
        gnid: gnid_or_identical(language, curve.encoder(best), prior)?,
        point: best,
        complexity: il,
        accuracy: al,
    })
}

/// C-IB: match the curve at the language's own complexity. Accuracy and β
/// are interpolated linearly between the bracketing grid points; the
/// comparison encoder is the nearer of the two. ε is the accuracy gap.
pub fn fit_beta_constrained(
    language_id: u32,
    language: &Encoder,
    curve: &IBCurve,
    prior: &Prior,
    space: &MeaningSpace,
) -> Result<LanguageFit> {
    if curve.points.is_empty() {
        return Err(Error::Empty("curve"));
    }
    let own = ib_objective(language, prior, space, 0.0)?;
    let (il, al) = (own.complexity, own.accuracy);
    let pts = &curve.points;
    let min = pts[0].complexity;
    let max = curve.max_complexity();
    if il < min - RANGE_SLACK || il > max + RANGE_SLACK {
        return Err(Error::OutOfRange { value: il, min, max });
    }
    let (i, t) = if pts.len() == 1 || il <= min {
        (0, 0.0)
    } else {
        let seg = pts
            .windows(2)
            .position(|w| w[0].complexity <= il && il <= w[1].complexity)
            .unwrap_or(pts.len() - 2);
        let (a, b) = (&pts[seg], &pts[seg + 1]);
        let span = b.complexity - a.complexity;
        let t = if span > 0.0 {
            ((il - a.complexity) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (seg, t)
    };
    let j = (i + 1).min(pts.len() - 1);
    let lerp = |x: f64, y: f64| x + t * (y - x);
    let beta = lerp(pts[i].beta, pts[j].beta);
    let acc_star = lerp(pts[i].accuracy, pts[j].accuracy);
    let nearer = if t <= 0.5 { i } else { j };
    let epsilon = acc_star - al;
    Ok(LanguageFit {
        language_id,
        beta,
        delta_f: beta * epsilon,
        epsilon,
        gnid: gnid_or_identical(language, curve.encoder(nearer), prior)?,
        point: nearer,
        complexity: il,
        accuracy: al,
    })
}
