use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{invalid, Error, Result};
use crate::meaning_space::MeaningSpace;

/// Row sums accepted by constructors before exact renormalization.
const ROW_ACCEPT_TOL: f64 = 1e-9;

/// Words whose marginal falls below this are treated as unused.
pub const DEAD_WORD: f64 = 1e-9;

/// Distribution over meanings, p(m).
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    probs: Array1<f64>,
}

impl Prior {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Empty("prior"));
        }
        if probs.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(invalid("prior has a negative or non-finite entry"));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > ROW_ACCEPT_TOL {
            return Err(invalid(format!("prior sums to {s}")));
        }
        Ok(Self {
            probs: Array1::from(probs) / s,
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: Array1::from_elem(n, 1.0 / n as f64),
        }
    }

    /// Raise every entry to at least `floor`, then renormalize.
    pub fn floored(probs: &[f64], floor: f64) -> Result<Self> {
        let raised: Vec<f64> = probs.iter().map(|&p| p.max(floor)).collect();
        let s: f64 = raised.iter().sum();
        Self::new(raised.into_iter().map(|p| p / s).collect())
    }

    pub fn probs(&self) -> &Array1<f64> {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// A naming policy q(w|m): N×K row-stochastic, with its word marginal q(w)
/// under the prior it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    matrix: Array2<f64>,
    word_marginal: Array1<f64>,
}

impl Encoder {
    /// Validates rows (within 1e-9), renormalizes them exactly, and computes
    /// q(w) under `prior`.
    pub fn new(mut matrix: Array2<f64>, prior: &Prior) -> Result<Self> {
        let (n, k) = matrix.dim();
        if k == 0 {
            return Err(invalid("encoder needs at least one word"));
        }
        if n != prior.len() {
            return Err(Error::DimensionMismatch(format!(
                "encoder has {n} rows, prior has {} meanings",
                prior.len()
            )));
        }
        for (i, mut row) in matrix.rows_mut().into_iter().enumerate() {
            if row.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(invalid(format!("encoder row {i} has a negative or non-finite entry")));
            }
            let s = row.sum();
            if (s - 1.0).abs() > ROW_ACCEPT_TOL {
                return Err(invalid(format!("encoder row {i} sums to {s}")));
            }
            row /= s;
        }
        Ok(Self::from_parts_unchecked(matrix, prior))
    }

    pub(crate) fn from_parts_unchecked(matrix: Array2<f64>, prior: &Prior) -> Self {
        let word_marginal = matrix.t().dot(prior.probs());
        Self { matrix, word_marginal }
    }

    /// q(w|m) = δ(w, m).
    pub fn identity(prior: &Prior) -> Self {
        Self::from_parts_unchecked(Array2::eye(prior.len()), prior)
    }

    /// Every meaning mapped to one word.
    pub fn single_word(prior: &Prior) -> Self {
        Self::from_parts_unchecked(Array2::ones((prior.len(), 1)), prior)
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn word_marginal(&self) -> &Array1<f64> {
        &self.word_marginal
    }

    pub fn n_meanings(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_words(&self) -> usize {
        self.matrix.ncols()
    }

    /// Same policy re-weighted by another prior.
    pub fn with_prior(&self, prior: &Prior) -> Result<Self> {
        if prior.len() != self.n_meanings() {
            return Err(Error::DimensionMismatch("prior length".into()));
        }
        Ok(Self::from_parts_unchecked(self.matrix.clone(), prior))
    }

    /// q(m|w) as an N×K matrix; unused words get zero columns.
    pub fn posterior(&self, prior: &Prior) -> Array2<f64> {
        let mut post = &self.matrix * &prior.probs().view().insert_axis(Axis(1));
        for (mut col, &qw) in post.columns_mut().into_iter().zip(&self.word_marginal) {
            if qw > 0.0 {
                col /= qw;
            } else {
                col.fill(0.0);
            }
        }
        post
    }

    /// Columns in lexicographic order, so that quantities computed from the
    /// result do not depend on word labels down to the last bit.
    pub(crate) fn canonical(&self) -> std::borrow::Cow<'_, Self> {
        let k = self.n_words();
        let cmp = |a: usize, b: usize| {
            let (ca, cb) = (self.matrix.column(a), self.matrix.column(b));
            ca.iter()
                .zip(cb.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        };
        if (1..k).all(|j| cmp(j - 1, j).is_le()) {
            return std::borrow::Cow::Borrowed(self);
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| cmp(a, b));
        std::borrow::Cow::Owned(self.permute_words(&order))
    }

    /// Columns permuted: new column `j` is old column `perm[j]`.
    pub fn permute_words(&self, perm: &[usize]) -> Self {
        let matrix = self.matrix.select(Axis(1), perm);
        let word_marginal = self.word_marginal.select(Axis(0), perm);
        Self { matrix, word_marginal }
    }
}

/// The ideal listener: row `w` is m̂_w(y) = Σ_m q(m|w) m(y).
#[derive(Debug, Clone)]
pub struct Decoder {
    rows: Array2<f64>,
    defined: Vec<bool>,
}

impl Decoder {
    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    pub fn is_defined(&self, word: usize) -> bool {
        self.defined[word]
    }

    pub fn row(&self, word: usize) -> Result<ArrayView1<'_, f64>> {
        if self.defined.get(word).copied().unwrap_or(false) {
            Ok(self.rows.row(word))
        } else {
            Err(Error::UndefinedWord { word })
        }
    }

    pub fn n_words(&self) -> usize {
        self.defined.len()
    }
}

pub fn bayesian_decoder(encoder: &Encoder, prior: &Prior, space: &MeaningSpace) -> Result<Decoder> {
    check_dims(encoder, prior, space)?;
    let post = encoder.posterior(prior);
    let rows = post.t().dot(space.rows());
    let defined = encoder.word_marginal().iter().map(|&q| q > 0.0).collect();
    Ok(Decoder { rows, defined })
}

pub(crate) fn check_dims(encoder: &Encoder, prior: &Prior, space: &MeaningSpace) -> Result<()> {
    if encoder.n_meanings() != prior.len() || prior.len() != space.len() {
        return Err(Error::DimensionMismatch(format!(
            "encoder rows {}, prior {}, meanings {}",
            encoder.n_meanings(),
            prior.len(),
            space.len()
        )));
    }
    Ok(())
}
