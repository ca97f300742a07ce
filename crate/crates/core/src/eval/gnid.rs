use ndarray::{Array2, Axis};

use crate::error::{Error, Result};
use crate::ib::{Encoder, Prior};
use crate::info::mutual_information;

/// Self-information below this many bits counts as none.
const UNINFORMATIVE: f64 = 1e-12;

/// Joint p(w, v) = Σ_m p(m) q1(w|m) q2(v|m).
fn coupling(a: &Array2<f64>, b: &Array2<f64>, prior: &Prior) -> Array2<f64> {
    let weighted = a * &prior.probs().view().insert_axis(Axis(1));
    weighted.t().dot(b)
}

/// Generalized normalized information distance between two soft
/// partitions of the same meanings:
///
/// ```text
/// gNID(W, V) = 1 − I(W;V) / max(I(W;W'), I(V;V'))
/// ```
///
/// where W' is an independent second draw from the same encoder.
pub fn gnid(q1: &Encoder, q2: &Encoder, prior: &Prior) -> Result<f64> {
    if q1.n_meanings() != prior.len() || q2.n_meanings() != prior.len() {
        return Err(Error::DimensionMismatch(
            "encoders and prior disagree on meanings".into(),
        ));
    }
    let (q1, q2) = (q1.canonical(), q2.canonical());
    let (mut a, mut b) = (q1.matrix(), q2.matrix());
    // a fixed argument order makes the result exactly symmetric
    if order_key(b, a).is_lt() {
        std::mem::swap(&mut a, &mut b);
    }
    let cross = mutual_information(coupling(a, b, prior).view())?;
    let self_a = mutual_information(coupling(a, a, prior).view())?;
    let self_b = mutual_information(coupling(b, b, prior).view())?;
    let denom = self_a.max(self_b);
    if denom < UNINFORMATIVE {
        return Err(Error::UndefinedSimilarity);
    }
    Ok(1.0 - cross / denom)
}

/// As [`gnid`], but two uninformative systems count as identical.
pub(crate) fn gnid_or_identical(q1: &Encoder, q2: &Encoder, prior: &Prior) -> Result<f64> {
    match gnid(q1, q2, prior) {
        Err(Error::UndefinedSimilarity) => Ok(0.0),
        other => other,
    }
}

fn order_key(a: &Array2<f64>, b: &Array2<f64>) -> std::cmp::Ordering {
    a.dim().cmp(&b.dim()).then_with(|| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}
