//! Synthetic stand-ins for survey data, used by tests and demos.
//!
//! [`wcs_layout_palette`] reproduces the 330-cell stimulus grid (10 achromatic
//! chips plus 8 lightness rows × 40 hue columns) with CIELAB coordinates from
//! a smooth analytic model. It is not the measured survey table; use
//! [`crate::wcs::parse_lab_table`] for that.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::meaning_space::{ColorChip, GridPos, Lab, Palette};
use crate::wcs::NamingObservation;

/// Row letters and their approximate Munsell values.
const ROWS: [(char, f64); 10] = [
    ('A', 9.5),
    ('B', 9.0),
    ('C', 8.0),
    ('D', 7.0),
    ('E', 6.0),
    ('F', 5.0),
    ('G', 4.0),
    ('H', 3.0),
    ('I', 2.0),
    ('J', 1.5),
];

fn lightness(value: f64) -> f64 {
    10.2 * value - 1.0
}

fn chromatic_lab(value: f64, col: u8) -> Lab {
    let l = lightness(value);
    let theta = (20.0 + 9.0 * (col as f64 - 1.0)).to_radians();
    // chroma peaks at high lightness for yellows and low lightness for blues
    let l_peak = 55.0 + 30.0 * (theta - 95f64.to_radians()).cos();
    let c = 20.0 + 55.0 * (-((l - l_peak) / 30.0).powi(2)).exp();
    Lab::new(l, c * theta.cos(), c * theta.sin())
}

/// The 330-chip grid with modeled CIELAB coordinates. Chip ids run row by
/// row: A0, B0, B1..B40, C0, ..., J0.
pub fn wcs_layout_palette() -> Palette {
    let mut chips = Vec::with_capacity(330);
    let mut id = 1;
    for &(row, value) in &ROWS {
        chips.push(ColorChip {
            chip_id: id,
            grid: GridPos { row, col: 0 },
            lab: Lab::new(lightness(value), 0.0, 0.0),
        });
        id += 1;
        if ('B'..='I').contains(&row) {
            for col in 1..=40u8 {
                chips.push(ColorChip {
                    chip_id: id,
                    grid: GridPos { row, col },
                    lab: chromatic_lab(value, col),
                });
                id += 1;
            }
        }
    }
    Palette::new(chips).expect("grid layout is valid")
}

/// Parameters for [`synthetic_observations`].
#[derive(Debug, Clone)]
pub struct SyntheticLanguages {
    pub n_languages: usize,
    pub speakers: usize,
    pub min_terms: usize,
    pub max_terms: usize,
    pub seed: u64,
}

impl Default for SyntheticLanguages {
    fn default() -> Self {
        Self {
            n_languages: 10,
            speakers: 15,
            min_terms: 3,
            max_terms: 10,
            seed: 7,
        }
    }
}

/// Naming responses for invented languages. Each language places a few
/// focal chips; a speaker names a chip by sampling a focal term with
/// probability decaying in squared CIELAB distance.
pub fn synthetic_observations(palette: &Palette, params: &SyntheticLanguages) -> Vec<NamingObservation> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let chips = palette.chips();
    let mut out = Vec::new();
    for lang in 0..params.n_languages {
        let language_id = lang as u32 + 1;
        let k = rng.random_range(params.min_terms..=params.max_terms).min(chips.len());
        let mut idx: Vec<usize> = (0..chips.len()).collect();
        idx.shuffle(&mut rng);
        let foci: Vec<&ColorChip> = idx[..k].iter().map(|&i| &chips[i]).collect();
        let width: f64 = rng.random_range(8.0..20.0);
        for speaker in 0..params.speakers {
            for chip in chips {
                let weights: Vec<f64> = foci
                    .iter()
                    .map(|f| {
                        let d2 = (f.lab.l - chip.lab.l).powi(2)
                            + (f.lab.a - chip.lab.a).powi(2)
                            + (f.lab.b - chip.lab.b).powi(2);
                        -d2 / (2.0 * width * width)
                    })
                    .collect();
                let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let probs: Vec<f64> = weights.iter().map(|w| (w - max).exp()).collect();
                let total: f64 = probs.iter().sum();
                let mut u = rng.random::<f64>() * total;
                let mut term = k - 1;
                for (t, p) in probs.iter().enumerate() {
                    if u < *p {
                        term = t;
                        break;
                    }
                    u -= p;
                }
                out.push(NamingObservation {
                    language_id,
                    speaker_id: speaker as u32 + 1,
                    chip_id: chip.chip_id,
                    term: format!("t{term}"),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_has_330_chips() {
        let p = wcs_layout_palette();
        assert_eq!(p.len(), 330);
        let achromatic = p.chips().iter().filter(|c| c.grid.col == 0).count();
        assert_eq!(achromatic, 10);
    }

    #[test]
    fn observations_cover_every_chip() {
        let p = wcs_layout_palette();
        let params = SyntheticLanguages {
            n_languages: 2,
            speakers: 3,
            ..Default::default()
        };
        let obs = synthetic_observations(&p, &params);
        assert_eq!(obs.len(), 2 * 3 * 330);
    }
}
