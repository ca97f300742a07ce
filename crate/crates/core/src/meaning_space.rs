//! Perceptual environment: color chips in CIELAB and the Gaussian meanings
//! attached to each chip.
//!
//! A meaning `m_c` is an isotropic Gaussian in CIELAB centered on chip `c`,
//! restricted to (and normalized over) the discrete palette:
//!
//! ```text
//! m_c(y) ∝ exp(-‖y - c‖² / (2σ²))
//! ```

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::HashSet;

use crate::error::{invalid, Error, Result};

/// Default perceptual variance, ΔE² units (σ ≈ 8 ΔE).
pub const DEFAULT_SIGMA_SQ: f64 = 64.0;

/// Tolerance used when validating probability vectors.
pub const NORM_TOL: f64 = 1e-12;

/// A point in CIELAB (1976) space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lab {
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl Lab {
    pub const fn new(l: f64, a: f64, b: f64) -> Self {
        Self { l, a, b }
    }

    fn is_finite(&self) -> bool {
        self.l.is_finite() && self.a.is_finite() && self.b.is_finite()
    }

    fn dist_sq(&self, other: &Lab) -> f64 {
        let dl = self.l - other.l;
        let da = self.a - other.a;
        let db = self.b - other.b;
        dl * dl + da * da + db * db
    }

    /// Convert to 8-bit sRGB (D65 white), clamping out-of-gamut channels.
    pub fn to_srgb8(&self) -> [u8; 3] {
        const XN: f64 = 0.95047;
        const YN: f64 = 1.0;
        const ZN: f64 = 1.08883;
        let fy = (self.l + 16.0) / 116.0;
        let fx = fy + self.a / 500.0;
        let fz = fy - self.b / 200.0;
        let finv = |t: f64| {
            if t > 6.0 / 29.0 {
                t * t * t
            } else {
                3.0 * (6.0f64 / 29.0).powi(2) * (t - 4.0 / 29.0)
            }
        };
        let (x, y, z) = (XN * finv(fx), YN * finv(fy), ZN * finv(fz));
        let r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
        let g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
        let b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
        let gamma = |c: f64| {
            let c = c.clamp(0.0, 1.0);
            let v = if c <= 0.0031308 {
                12.92 * c
            } else {
                1.055 * c.powf(1.0 / 2.4) - 0.055
            };
            (v * 255.0).round() as u8
        };
        [gamma(r), gamma(g), gamma(b)]
    }
}

/// CIELAB-1976 color difference: the Euclidean norm between two points.
pub fn cielab_distance(a: &Lab, b: &Lab) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(invalid("non-finite CIELAB coordinate"));
    }
    Ok(a.dist_sq(b).sqrt())
}

/// Position of a chip on the stimulus grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPos {
    pub row: char,
    pub col: u8,
}

impl GridPos {
    /// Achromatic chips sit in column 0 (rows A..J); chromatic chips in rows
    /// B..I, columns 1..40.
    pub fn is_valid(&self) -> bool {
        match self.col {
            0 => ('A'..='J').contains(&self.row),
            1..=40 => ('B'..='I').contains(&self.row),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorChip {
    pub chip_id: u32,
    pub grid: GridPos,
    pub lab: Lab,
}

/// Ordered set of chips. Iteration order is ascending `chip_id`; every
/// matrix in the crate indexes chips in this order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    chips: Vec<ColorChip>,
}

impl Palette {
    pub fn new(mut chips: Vec<ColorChip>) -> Result<Self> {
        chips.sort_by_key(|c| c.chip_id);
        let mut ids = HashSet::new();
        let mut cells = HashSet::new();
        for chip in &chips {
            if !ids.insert(chip.chip_id) {
                return Err(invalid(format!("duplicate chip id {}", chip.chip_id)));
            }
            if !chip.grid.is_valid() {
                return Err(invalid(format!(
                    "chip {} has invalid grid position {}{}",
                    chip.chip_id, chip.grid.row, chip.grid.col
                )));
            }
            if !cells.insert(chip.grid) {
                return Err(invalid(format!(
                    "grid cell {}{} used twice",
                    chip.grid.row, chip.grid.col
                )));
            }
            if !chip.lab.is_finite() {
                return Err(invalid(format!("chip {} has non-finite CIELAB", chip.chip_id)));
            }
        }
        Ok(Self { chips })
    }

    pub fn chips(&self) -> &[ColorChip] {
        &self.chips
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    /// Position of `chip_id` in palette order.
    pub fn index_of(&self, chip_id: u32) -> Option<usize> {
        self.chips.binary_search_by_key(&chip_id, |c| c.chip_id).ok()
    }
}

/// A probability vector over palette chips.
#[derive(Debug, Clone, PartialEq)]
pub struct MeaningDistribution {
    pub probs: Vec<f64>,
}

/// Gaussian meaning centered on `center`, normalized over the palette.
pub fn build_meaning(center: &ColorChip, palette: &Palette, sigma_sq: f64) -> Result<MeaningDistribution> {
    if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
        return Err(invalid(format!("sigma_sq must be positive and finite, got {sigma_sq}")));
    }
    let logits: Vec<f64> = palette
        .chips()
        .iter()
        .map(|y| -y.lab.dist_sq(&center.lab) / (2.0 * sigma_sq))
        .collect();
    // shift by the max so tiny σ² does not underflow the whole row
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(MeaningDistribution { probs })
}

/// The set of meanings: an N×N row-stochastic matrix, row `c` is `m_c(y)`.
#[derive(Debug, Clone)]
pub struct MeaningSpace {
    palette: Option<Palette>,
    sigma_sq: Option<f64>,
    rows: Array2<f64>,
    /// Σ_y m(y) ln m(y) per row, nats.
    neg_entropy: Array1<f64>,
}

impl MeaningSpace {
    pub fn build(palette: &Palette, sigma_sq: f64) -> Result<Self> {
        if palette.is_empty() {
            return Err(Error::Empty("palette"));
        }
        let n = palette.len();
        let mut rows = Array2::zeros((n, n));
        for (i, chip) in palette.chips().iter().enumerate() {
            let m = build_meaning(chip, palette, sigma_sq)?;
            rows.row_mut(i).assign(&Array1::from(m.probs));
        }
        let mut space = Self::from_rows(rows)?;
        space.palette = Some(palette.clone());
        space.sigma_sq = Some(sigma_sq);
        Ok(space)
    }

    /// Meaning space from an arbitrary square row-stochastic matrix.
    pub fn from_rows(rows: Array2<f64>) -> Result<Self> {
        let (n, n2) = rows.dim();
        if n == 0 {
            return Err(Error::Empty("meaning matrix"));
        }
        if n != n2 {
            return Err(Error::DimensionMismatch(format!("meaning matrix is {n}x{n2}")));
        }
        for (i, row) in rows.rows().into_iter().enumerate() {
            if row.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(invalid(format!("meaning {i} has a negative or non-finite entry")));
            }
            let s: f64 = row.sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(invalid(format!("meaning {i} sums to {s}")));
            }
        }
        let neg_entropy = rows
            .rows()
            .into_iter()
            .map(|r| r.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum())
            .collect();
        Ok(Self {
            palette: None,
            sigma_sq: None,
            rows,
            neg_entropy,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    pub fn palette(&self) -> Option<&Palette> {
        self.palette.as_ref()
    }

    pub fn sigma_sq(&self) -> Option<f64> {
        self.sigma_sq
    }

    pub(crate) fn neg_entropy(&self) -> &Array1<f64> {
        &self.neg_entropy
    }

    /// Hex SHA-256 of the matrix entries (little-endian f64 bytes).
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.len() as u64).to_le_bytes());
        for v in self.rows.iter() {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}
