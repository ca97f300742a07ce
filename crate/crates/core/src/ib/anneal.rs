//! Deterministic annealing along a β schedule and assembly of the IB curve.
//!
//! Two chains are available. The forward chain starts from a single word at
//! the lowest β and, at every step, offers each category a perturbed twin so
//! that categories can split once β passes a bifurcation. The reverse chain
//! starts from the identity encoder at the highest β and lets categories
//! merge as β decreases. Between steps, columns whose posteriors q(m|w)
//! coincide are merged; this leaves I(M;W) and I(Y;W) unchanged and keeps
//! the working width near the number of live categories instead of `k_max`.
//!
//! In [`AnnealMode::Both`] the curve is the lower envelope of F_β over every
//! encoder either chain produced, plus the identity encoder, evaluated at
//! each grid β.

use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::encoder::{Encoder, Prior};
use super::objective::{ib_objective, IBPoint, DEFAULT_MERGE_TOL};
use super::solver::{iterate, Kernel, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::error::{invalid, Result};
use crate::meaning_space::MeaningSpace;

/// Words below this marginal are dropped from the working encoder.
const WORKING_DEAD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnealMode {
    Forward,
    Reverse,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    /// Ascending β grid.
    pub schedule: Vec<f64>,
    pub k_max: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Relative size of the symmetry-breaking noise applied at each step.
    pub perturbation: f64,
    /// Total-variation threshold for counting categories (effective K).
    pub merge_tol: f64,
    /// Total-variation threshold on q(m|w) for collapsing working columns.
    pub collapse_tol: f64,
    pub mode: AnnealMode,
}

impl AnnealConfig {
    pub fn new(schedule: Vec<f64>, k_max: usize) -> Self {
        Self {
            schedule,
            k_max,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            perturbation: 1e-2,
            merge_tol: DEFAULT_MERGE_TOL,
            collapse_tol: 1e-3,
            mode: AnnealMode::Both,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(invalid("empty beta schedule"));
        }
        if self.schedule.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("beta schedule must be strictly ascending"));
        }
        if self.schedule[0] < 0.0 || self.schedule[0] > 1.0 {
            return Err(invalid(format!(
                "schedule must start in [0, 1], starts at {}",
                self.schedule[0]
            )));
        }
        if self.k_max == 0 {
            return Err(invalid("k_max must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        Ok(())
    }
}

/// `steps` points spaced geometrically from `beta_min` to `beta_max`
/// inclusive.
pub fn geometric_schedule(beta_min: f64, beta_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(beta_min > 0.0) || !(beta_max > beta_min) || steps < 2 {
        return Err(invalid(format!(
            "bad geometric schedule ({beta_min}, {beta_max}, {steps})"
        )));
    }
    let ratio = (beta_max / beta_min).ln() / (steps - 1) as f64;
    let mut s: Vec<f64> = (0..steps).map(|i| beta_min * (ratio * i as f64).exp()).collect();
    s[steps - 1] = beta_max;
    Ok(s)
}

/// An encoder produced by one annealing step.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub beta: f64,
    pub encoder: Encoder,
    pub complexity: f64,
    pub accuracy: f64,
    pub converged: bool,
}

/// The information-plane limit traced by optimal encoders.
#[derive(Debug, Clone)]
pub struct IBCurve {
    pub points: Vec<IBPoint>,
    /// `false` where the encoder behind a point did not converge.
    pub converged: Vec<bool>,
    /// Encoders addressed by `IBPoint::encoder_ref`.
    pub encoders: Vec<Encoder>,
    pub source: Prior,
    pub meaning_digest: String,
    pub config: AnnealConfig,
}

impl IBCurve {
    pub fn encoder(&self, point: usize) -> &Encoder {
        let r = self.points[point].encoder_ref.expect("curve points carry encoders");
        &self.encoders[r]
    }

    pub fn max_complexity(&self) -> f64 {
        self.points.iter().map(|p| p.complexity).fold(0.0, f64::max)
    }

    /// β values at which the effective lexicon size increases, with the
    /// sizes before and after.
    pub fn transitions(&self) -> Vec<(f64, usize, usize)> {
        self.points
            .windows(2)
            .filter(|w| w[1].effective_k > w[0].effective_k)
            .map(|w| (w[1].beta, w[0].effective_k, w[1].effective_k))
            .collect()
    }
}

pub fn anneal_curve(prior: &Prior, space: &MeaningSpace, config: &AnnealConfig) -> Result<IBCurve> {
    config.validate()?;
    if prior.len() != space.len() {
        return Err(crate::Error::DimensionMismatch("prior vs meaning space".into()));
    }
    let candidates = match config.mode {
        AnnealMode::Forward => forward_chain(prior, space, config)?,
        AnnealMode::Reverse => reverse_chain(prior, space, config)?,
        AnnealMode::Both => {
            let (fwd, rev) = std::thread::scope(|s| {
                let f = s.spawn(|| forward_chain(prior, space, config));
                let r = reverse_chain(prior, space, config);
                (f.join().expect("forward chain panicked"), r)
            });
            let mut all = fwd?;
            all.extend(rev?);
            // the exact β → ∞ limit; a solve stopped at tol can sit just above it
            let top = *config.schedule.last().expect("validated");
            all.push(candidate(prior, space, top, &Array2::eye(prior.len()), true)?);
            all
        }
    };
    assemble(prior, space, config, &candidates)
}

/// Build the curve from candidates: each grid β takes the candidate with the
/// lowest F_β (lowest index on ties within rounding).
fn assemble(prior: &Prior, space: &MeaningSpace, config: &AnnealConfig, candidates: &[Candidate]) -> Result<IBCurve> {
    let mut chosen: Vec<usize> = Vec::with_capacity(config.schedule.len());
    match config.mode {
        AnnealMode::Both => {
            for &beta in &config.schedule {
                let mut best = 0;
                let mut best_f = f64::INFINITY;
                for (i, c) in candidates.iter().enumerate() {
                    let f = c.complexity - beta * c.accuracy;
                    // rounding noise must not displace an earlier candidate
                    if best_f.is_infinite() || f < best_f - 1e-15 * best_f.abs().max(1.0) {
                        best_f = f;
                        best = i;
                    }
                }
                chosen.push(best);
            }
        }
        // single chains keep one candidate per grid point, in grid order
        _ => chosen.extend(0..candidates.len()),
    }

    let mut slot = vec![usize::MAX; candidates.len()];
    let mut encoders = Vec::new();
    let mut points = Vec::with_capacity(chosen.len());
    let mut converged = Vec::with_capacity(chosen.len());
    for (&beta, &ci) in config.schedule.iter().zip(&chosen) {
        let c = &candidates[ci];
        if slot[ci] == usize::MAX {
            slot[ci] = encoders.len();
            encoders.push(c.encoder.clone());
        }
        let mut pt = ib_objective(&c.encoder, prior, space, beta)?;
        if config.merge_tol != DEFAULT_MERGE_TOL {
            pt.effective_k = super::objective::effective_lexicon_size(&c.encoder, prior, space, config.merge_tol)?;
        }
        pt.encoder_ref = Some(slot[ci]);
        points.push(pt);
        converged.push(c.converged);
    }
    Ok(IBCurve {
        points,
        converged,
        encoders,
        source: prior.clone(),
        meaning_digest: space.digest(),
        config: config.clone(),
    })
}

pub fn forward_chain(prior: &Prior, space: &MeaningSpace, config: &AnnealConfig) -> Result<Vec<Candidate>> {
    config.validate()?;
    let kernel = Kernel::new(prior, space);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut q = Array2::ones((prior.len(), 1));
    let mut out = Vec::with_capacity(config.schedule.len());
    for &beta in &config.schedule {
        q = split(&q, config.k_max);
        perturb(&mut q, config.perturbation, &mut rng);
        let run = iterate(&kernel, q, beta, config.tol, config.max_iter);
        if !run.converged {
            log::warn!("forward chain: beta {beta} not converged (dF {:e})", run.delta_f);
        }
        q = collapse(&run.q, prior, config.collapse_tol);
        let c = candidate(prior, space, beta, &q, run.converged)?;
        log::debug!(
            "forward beta {beta:.4}: {} columns, {} iters, I={:.5} A={:.5}",
            q.ncols(),
            run.iterations,
            c.complexity,
            c.accuracy
        );
        out.push(c);
    }
    Ok(out)
}

/// Anneals from the top of the schedule down. Requires `k_max ≥ N`; the
/// result is returned in ascending β order.
pub fn reverse_chain(prior: &Prior, space: &MeaningSpace, config: &AnnealConfig) -> Result<Vec<Candidate>> {
    config.validate()?;
    if config.k_max < prior.len() {
        return Err(invalid(format!(
            "reverse annealing starts from the identity encoder and needs k_max >= {}",
            prior.len()
        )));
    }
    let kernel = Kernel::new(prior, space);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_7e7e_0000_0001);
    let mut q: Array2<f64> = Array2::eye(prior.len());
    let mut out = Vec::with_capacity(config.schedule.len());
    for &beta in config.schedule.iter().rev() {
        perturb(&mut q, config.perturbation, &mut rng);
        let run = iterate(&kernel, q, beta, config.tol, config.max_iter);
        if !run.converged {
            log::warn!("reverse chain: beta {beta} not converged (dF {:e})", run.delta_f);
        }
        q = collapse(&run.q, prior, config.collapse_tol);
        let c = candidate(prior, space, beta, &q, run.converged)?;
        log::debug!(
            "reverse beta {beta:.4}: {} columns, {} iters, I={:.5} A={:.5}",
            q.ncols(),
            run.iterations,
            c.complexity,
            c.accuracy
        );
        out.push(c);
    }
    out.reverse();
    Ok(out)
}

fn candidate(prior: &Prior, space: &MeaningSpace, beta: f64, q: &Array2<f64>, converged: bool) -> Result<Candidate> {
    let encoder = Encoder::from_parts_unchecked(q.clone(), prior);
    let pt = ib_objective(&encoder, prior, space, beta)?;
    Ok(Candidate {
        beta,
        encoder,
        complexity: pt.complexity,
        accuracy: pt.accuracy,
        converged,
    })
}

/// Give each column a twin carrying half its mass, up to `k_max` columns.
fn split(q: &Array2<f64>, k_max: usize) -> Array2<f64> {
    let k = q.ncols();
    let extra = k.min(k_max.saturating_sub(k));
    if extra == 0 {
        return q.clone();
    }
    let mut out = Array2::zeros((q.nrows(), k + extra));
    for j in 0..k {
        let col = q.column(j);
        if j < extra {
            out.column_mut(j).assign(&(&col * 0.5));
            out.column_mut(k + j).assign(&(&col * 0.5));
        } else {
            out.column_mut(j).assign(&col);
        }
    }
    out
}

/// Multiply every entry by (1 + u·eps), u ~ U(−1, 1), then renormalize rows.
fn perturb(q: &mut Array2<f64>, eps: f64, rng: &mut ChaCha8Rng) {
    if eps == 0.0 {
        return;
    }
    for mut row in q.rows_mut() {
        row.mapv_inplace(|v| v * (1.0 + eps * rng.random_range(-1.0..1.0)));
        let s = row.sum();
        row /= s;
    }
}

/// Drop dead words and merge words whose posteriors q(m|w) are within `tol`
/// total variation.
pub(crate) fn collapse(q: &Array2<f64>, prior: &Prior, tol: f64) -> Array2<f64> {
    let qw = q.t().dot(prior.probs());
    let live: Vec<usize> = (0..q.ncols()).filter(|&w| qw[w] >= WORKING_DEAD).collect();
    let mut post = q.select(Axis(1), &live) * &prior.probs().view().insert_axis(Axis(1));
    for (mut col, &w) in post.columns_mut().into_iter().zip(&live) {
        col /= qw[w];
    }
    // greedy: every word joins the first earlier group whose leader is close
    let mut leaders: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for j in 0..live.len() {
        let found = leaders.iter().position(|&l| {
            let tv: f64 = post
                .column(l)
                .iter()
                .zip(post.column(j).iter())
                .map(|(a, b)| (a - b).abs())
                .sum();
            0.5 * tv < tol
        });
        match found {
            Some(g) => groups[g].push(live[j]),
            None => {
                leaders.push(j);
                groups.push(vec![live[j]]);
            }
        }
    }
    let mut out = Array2::zeros((q.nrows(), groups.len()));
    for (g, members) in groups.iter().enumerate() {
        let mut col = out.column_mut(g);
        for &w in members {
            col += &q.column(w);
        }
    }
    for mut row in out.rows_mut() {
        let s = row.sum();
        if s > 0.0 {
            row /= s;
        } else {
            // every word this meaning used was dead: fall back to uniform
            let k = row.len() as f64;
            row.fill(1.0 / k);
        }
    }
    out
}
