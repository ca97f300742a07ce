use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::encoder::{bayesian_decoder, check_dims, Encoder, Prior, DEAD_WORD};
use crate::error::{invalid, Result};
use crate::info::{kl_divergence, mutual_information};
use crate::meaning_space::MeaningSpace;

/// Default total-variation threshold under which two words count as one
/// category.
pub const DEFAULT_MERGE_TOL: f64 = 1e-3;

/// One point of the information plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IBPoint {
    pub beta: f64,
    /// I(M;W), bits.
    pub complexity: f64,
    /// I(Y;W), bits.
    pub accuracy: f64,
    /// complexity − beta · accuracy.
    pub free_energy: f64,
    pub effective_k: usize,
    /// Index of the stored encoder, when the point belongs to a curve.
    pub encoder_ref: Option<usize>,
}

/// Complexity I(M;W) in bits.
pub fn complexity(encoder: &Encoder, prior: &Prior) -> Result<f64> {
    let encoder = encoder.canonical();
    let joint = encoder.matrix() * &prior.probs().view().insert_axis(Axis(1));
    mutual_information(joint.view())
}

/// Accuracy I(Y;W) in bits, from the joint p(w, y) = Σ_m p(m) q(w|m) m(y).
pub fn accuracy(encoder: &Encoder, prior: &Prior, space: &MeaningSpace) -> Result<f64> {
    check_dims(encoder, prior, space)?;
    let encoder = encoder.canonical();
    let weighted = encoder.matrix() * &prior.probs().view().insert_axis(Axis(1));
    let joint: Array2<f64> = weighted.t().dot(space.rows());
    mutual_information(joint.view())
}

/// I(M;Y) in bits: the accuracy ceiling of any encoder.
pub fn meaning_information(prior: &Prior, space: &MeaningSpace) -> Result<f64> {
    if prior.len() != space.len() {
        return Err(crate::Error::DimensionMismatch("prior vs meaning space".into()));
    }
    let joint = space.rows() * &prior.probs().view().insert_axis(Axis(1));
    mutual_information(joint.view())
}

/// E_q[D[M‖M̂]] in bits, summed term by term through `kl_divergence`.
pub fn expected_distortion(encoder: &Encoder, prior: &Prior, space: &MeaningSpace) -> Result<f64> {
    let decoder = bayesian_decoder(encoder, prior, space)?;
    let mut total = 0.0;
    for (m, meaning) in space.rows().rows().into_iter().enumerate() {
        let pm = prior.probs()[m];
        if pm == 0.0 {
            continue;
        }
        for w in 0..encoder.n_words() {
            let q = encoder.matrix()[[m, w]];
            if q == 0.0 {
                continue;
            }
            let d = kl_divergence(
                meaning.as_slice().expect("standard layout"),
                decoder.row(w)?.as_slice().expect("standard layout"),
            )?;
            total += pm * q * d;
        }
    }
    Ok(total)
}

pub fn ib_objective(encoder: &Encoder, prior: &Prior, space: &MeaningSpace, beta: f64) -> Result<IBPoint> {
    if !(beta >= 0.0) {
        return Err(invalid(format!("beta must be nonnegative, got {beta}")));
    }
    check_dims(encoder, prior, space)?;
    let encoder = &*encoder.canonical();
    let complexity = complexity(encoder, prior)?;
    let accuracy = accuracy(encoder, prior, space)?;
    Ok(IBPoint {
        beta,
        complexity,
        accuracy,
        free_energy: complexity - beta * accuracy,
        effective_k: effective_lexicon_size(encoder, prior, space, DEFAULT_MERGE_TOL)?,
        encoder_ref: None,
    })
}

/// Number of distinct word categories: words with q(w) < 1e-9 are dropped,
/// and words whose decoders are within `merge_tol` total variation of an
/// earlier category's representative are merged into it.
pub fn effective_lexicon_size(encoder: &Encoder, prior: &Prior, space: &MeaningSpace, merge_tol: f64) -> Result<usize> {
    let encoder = &*encoder.canonical();
    let decoder = bayesian_decoder(encoder, prior, space)?;
    let mut reps: Vec<usize> = Vec::new();
    for w in 0..encoder.n_words() {
        if encoder.word_marginal()[w] < DEAD_WORD {
            continue;
        }
        let row = decoder.rows().row(w);
        let merged = reps.iter().any(|&r| {
            let other = decoder.rows().row(r);
            0.5 * row.iter().zip(other.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>() < merge_tol
        });
        if !merged {
            reps.push(w);
        }
    }
    Ok(reps.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn space3() -> MeaningSpace {
        MeaningSpace::from_rows(array![[0.7, 0.2, 0.1], [0.2, 0.6, 0.2], [0.1, 0.2, 0.7]]).unwrap()
    }

    #[test]
    fn single_word_is_zero_everywhere() {
        let space = space3();
        let prior = Prior::new(vec![0.2, 0.5, 0.3]).unwrap();
        for beta in [0.0, 1.0, 7.5] {
            let pt = ib_objective(&Encoder::single_word(&prior), &prior, &space, beta).unwrap();
            assert_abs_diff_eq!(pt.complexity, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(pt.accuracy, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(pt.free_energy, 0.0, epsilon = 1e-15);
            assert_eq!(pt.effective_k, 1);
        }
    }

    #[test]
    fn identity_complexity_is_prior_entropy() {
        let space = space3();
        let prior = Prior::new(vec![0.2, 0.5, 0.3]).unwrap();
        let pt = ib_objective(&Encoder::identity(&prior), &prior, &space, 3.0).unwrap();
        let h = crate::info::entropy(prior.probs().as_slice().unwrap());
        assert_abs_diff_eq!(pt.complexity, h, epsilon = 1e-12);
        assert_abs_diff_eq!(
            pt.accuracy,
            meaning_information(&prior, &space).unwrap(),
            epsilon = 1e-12
        );
        assert_eq!(pt.effective_k, 3);
        assert_abs_diff_eq!(pt.free_energy, pt.complexity - 3.0 * pt.accuracy, epsilon = 1e-12);
    }

    #[test]
    fn negative_beta_rejected() {
        let space = space3();
        let prior = Prior::uniform(3);
        assert!(ib_objective(&Encoder::identity(&prior), &prior, &space, -1.0).is_err());
    }

    #[test]
    fn duplicated_column_merges() {
        let space = space3();
        let prior = Prior::uniform(3);
        // word 2 duplicates word 1
        let enc = Encoder::new(array![[1.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 0.5]], &prior).unwrap();
        assert_eq!(effective_lexicon_size(&enc, &prior, &space, 1e-3).unwrap(), 2);
        let id = Encoder::identity(&prior);
        assert_eq!(effective_lexicon_size(&id, &prior, &space, 1e-3).unwrap(), 3);
    }
}
