//! Self-consistent IB iterations.
//!
//! Alternating updates of the encoder, word marginal, and decoder:
//!
//! ```text
//! q'(w|m) ∝ q(w) · exp(−β · D[m ‖ m̂_w])     (D in nats)
//! ```
//!
//! Each update is a coordinate-wise minimization of
//! `I(M;W) + β·E[D[M‖M̂]]`, which equals `F_β + β·I(M;Y)`, so the free
//! energy never increases.

use ndarray::{Array1, Array2, Axis, Zip};

use super::encoder::{check_dims, Encoder, Prior};
use super::objective::{ib_objective, IBPoint};
use crate::error::{invalid, Result};
use crate::meaning_space::MeaningSpace;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Precomputed per-(prior, space) quantities shared by every iteration.
pub(crate) struct Kernel<'a> {
    prior: &'a Prior,
    space: &'a MeaningSpace,
    /// I(M;Y) in nats.
    mi_meaning: f64,
}

/// Everything the update rule and the objective need from one encoder.
pub(crate) struct Stats {
    pub qw: Array1<f64>,
    /// N×K divergences D[m ‖ m̂_w], nats.
    pub kl: Array2<f64>,
    pub complexity_nats: f64,
    pub distortion_nats: f64,
}

impl Stats {
    pub fn complexity_bits(&self) -> f64 {
        self.complexity_nats / std::f64::consts::LN_2
    }

    pub fn accuracy_bits(&self, kernel: &Kernel<'_>) -> f64 {
        (kernel.mi_meaning - self.distortion_nats).max(0.0) / std::f64::consts::LN_2
    }

    pub fn free_energy(&self, kernel: &Kernel<'_>, beta: f64) -> f64 {
        self.complexity_bits() - beta * self.accuracy_bits(kernel)
    }
}

impl<'a> Kernel<'a> {
    pub fn new(prior: &'a Prior, space: &'a MeaningSpace) -> Self {
        let p = prior.probs();
        let py = p.dot(space.rows());
        let mut mi = 0.0;
        for (m, row) in space.rows().rows().into_iter().enumerate() {
            if p[m] == 0.0 {
                continue;
            }
            let s: f64 = row
                .iter()
                .zip(&py)
                .filter(|(&v, _)| v > 0.0)
                .map(|(&v, &q)| v * (v / q).ln())
                .sum();
            mi += p[m] * s;
        }
        Self {
            prior,
            space,
            mi_meaning: mi,
        }
    }

    pub fn evaluate(&self, q: &Array2<f64>) -> Stats {
        let p = self.prior.probs();
        let qw = q.t().dot(p);
        let mut post = q * &p.view().insert_axis(Axis(1));
        for (mut col, &m) in post.columns_mut().into_iter().zip(&qw) {
            if m > 0.0 {
                col /= m;
            } else {
                col.fill(0.0);
            }
        }
        let mut log_dec = post.t().dot(self.space.rows());
        // zero decoder entries would make 0·ln 0 a NaN inside the product
        log_dec.mapv_inplace(|v| v.max(f64::MIN_POSITIVE).ln());
        let cross = self.space.rows().dot(&log_dec.t());
        let neg_h = self.space.neg_entropy();
        let mut kl = cross;
        Zip::from(kl.rows_mut()).and(neg_h).for_each(|mut row, &nh| {
            row.mapv_inplace(|c| (nh - c).max(0.0));
        });

        let mut complexity = 0.0;
        let mut distortion = 0.0;
        for (m, (qrow, klrow)) in q.rows().into_iter().zip(kl.rows()).enumerate() {
            let pm = p[m];
            if pm == 0.0 {
                continue;
            }
            let mut c = 0.0;
            let mut d = 0.0;
            for ((&v, &k), &mw) in qrow.iter().zip(klrow.iter()).zip(&qw) {
                if v > 0.0 {
                    c += v * (v / mw).ln();
                    d += v * k;
                }
            }
            complexity += pm * c;
            distortion += pm * d;
        }
        Stats {
            qw,
            kl,
            complexity_nats: complexity.max(0.0),
            distortion_nats: distortion,
        }
    }

    /// One application of the update rule given the current statistics.
    pub fn update(&self, stats: &Stats, beta: f64) -> Array2<f64> {
        let log_qw = stats.qw.mapv(|v| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY });
        let mut next = stats.kl.clone();
        for mut row in next.rows_mut() {
            Zip::from(&mut row).and(&log_qw).for_each(|x, &lq| {
                *x = lq - beta * *x;
            });
            // log-space shift: the best word always gets exp(0) = 1
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            row.mapv_inplace(|x| (x - max).exp());
            let s = row.sum();
            row /= s;
        }
        next
    }
}

/// One self-consistent update.
pub fn fixed_point_step(encoder: &Encoder, prior: &Prior, space: &MeaningSpace, beta: f64) -> Result<Encoder> {
    check_dims(encoder, prior, space)?;
    if !(beta >= 0.0) {
        return Err(invalid(format!("beta must be nonnegative, got {beta}")));
    }
    let kernel = Kernel::new(prior, space);
    let stats = kernel.evaluate(encoder.matrix());
    Ok(Encoder::from_parts_unchecked(kernel.update(&stats, beta), prior))
}

/// Result of [`solve_ib`]. When `converged` is false the encoder is the last
/// iterate and `delta_f` the last change in free energy.
#[derive(Debug, Clone)]
pub struct Solution {
    pub encoder: Encoder,
    pub point: IBPoint,
    pub iterations: usize,
    pub delta_f: f64,
    pub converged: bool,
}

pub fn solve_ib(
    prior: &Prior,
    space: &MeaningSpace,
    beta: f64,
    init: &Encoder,
    tol: f64,
    max_iter: usize,
) -> Result<Solution> {
    check_dims(init, prior, space)?;
    if !(tol > 0.0) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    if !(beta >= 0.0) {
        return Err(invalid(format!("beta must be nonnegative, got {beta}")));
    }
    let kernel = Kernel::new(prior, space);
    let run = iterate(&kernel, init.matrix().clone(), beta, tol, max_iter);
    let encoder = Encoder::from_parts_unchecked(run.q, prior);
    let point = ib_objective(&encoder, prior, space, beta)?;
    Ok(Solution {
        encoder,
        point,
        iterations: run.iterations,
        delta_f: run.delta_f,
        converged: run.converged,
    })
}

pub(crate) struct Run {
    pub q: Array2<f64>,
    pub iterations: usize,
    pub delta_f: f64,
    pub converged: bool,
}

/// Runs the update rule until |ΔF| < `tol`.
///
/// Plain updates are interleaved with squared extrapolation: from q0, two
/// updates give q1 and q2, and the point q0 − 2αr + α²v (r = q1 − q0,
/// v = q2 − 2q1 + q0) is kept only if its free energy is no higher than
/// that of q2. The free energy is therefore still nonincreasing, and the
/// fixed points are those of the plain update.
pub(crate) fn iterate(kernel: &Kernel<'_>, q: Array2<f64>, beta: f64, tol: f64, max_iter: usize) -> Run {
    let mut q = q;
    let mut stats = kernel.evaluate(&q);
    let mut f = stats.free_energy(kernel, beta);
    let mut delta_f = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        let q1 = kernel.update(&stats, beta);
        let s1 = kernel.evaluate(&q1);
        it += 1;
        let f1 = s1.free_energy(kernel, beta);
        if (f - f1).abs() < tol || it == max_iter {
            let converged = (f - f1).abs() < tol;
            return Run {
                q: q1,
                iterations: it,
                delta_f: f - f1,
                converged,
            };
        }
        let q2 = kernel.update(&s1, beta);
        let s2 = kernel.evaluate(&q2);
        it += 1;
        let f2 = s2.free_energy(kernel, beta);
        let (mut next, mut next_stats, mut next_f) = (q2, s2, f2);
        if let Some(qx) = extrapolate(&q, &q1, &next) {
            let sx = kernel.evaluate(&qx);
            let fx = sx.free_energy(kernel, beta);
            if fx <= next_f {
                (next, next_stats, next_f) = (qx, sx, fx);
            }
        }
        delta_f = f - next_f;
        q = next;
        stats = next_stats;
        f = next_f;
        if delta_f.abs() < tol {
            return Run {
                q,
                iterations: it,
                delta_f,
                converged: true,
            };
        }
    }
    Run {
        q,
        iterations: it,
        delta_f,
        converged: false,
    }
}

/// Largest extrapolation step, in units of the plain step.
const MAX_STEP: f64 = 64.0;

fn extrapolate(q0: &Array2<f64>, q1: &Array2<f64>, q2: &Array2<f64>) -> Option<Array2<f64>> {
    let r = q1 - q0;
    let v = q2 - q1 - &r;
    let rn = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(vn > 0.0) || !(rn > 0.0) {
        return None;
    }
    let a = (rn / vn).clamp(1.0, MAX_STEP);
    if a == 1.0 {
        return None;
    }
    let mut x = q0 + &(&r * (2.0 * a)) + &(&v * (a * a));
    for mut row in x.rows_mut() {
        row.mapv_inplace(|p| if p > 0.0 { p } else { 0.0 });
        let s = row.sum();
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        row /= s;
    }
    Some(x)
}
