#![allow(dead_code)]

use ibcolor::ib::{Encoder, Prior};
use ibcolor::meaning_space::{ColorChip, GridPos, Lab, MeaningSpace, Palette};
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Chips on row F with the given CIELAB values, ids from 1.
pub fn palette_of(labs: &[Lab]) -> Palette {
    let chips = labs
        .iter()
        .enumerate()
        .map(|(i, &lab)| ColorChip {
            chip_id: i as u32 + 1,
            grid: GridPos {
                row: 'F',
                col: i as u8 + 1,
            },
            lab,
        })
        .collect();
    Palette::new(chips).unwrap()
}

/// `n` chips evenly spaced `step` apart along a*.
pub fn line_palette(n: usize, step: f64) -> Palette {
    let labs: Vec<Lab> = (0..n).map(|i| Lab::new(50.0, i as f64 * step, 0.0)).collect();
    palette_of(&labs)
}

pub fn random_stochastic(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    let mut m = Array2::from_shape_fn((rows, cols), |_| rng.random::<f64>() + 1e-3);
    for mut r in m.rows_mut() {
        let s = r.sum();
        r /= s;
    }
    m
}

pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-2).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> MeaningSpace {
    MeaningSpace::from_rows(random_stochastic(rng, n, n)).unwrap()
}

pub fn random_encoder(rng: &mut ChaCha8Rng, prior: &Prior, k: usize) -> Encoder {
    Encoder::new(random_stochastic(rng, prior.len(), k), prior).unwrap()
}

/// Row-stochastic within `tol`.
pub fn is_stochastic(m: &Array2<f64>, tol: f64) -> bool {
    m.iter().all(|&v| v >= 0.0) && m.rows().into_iter().all(|r| (r.sum() - 1.0).abs() < tol)
}
