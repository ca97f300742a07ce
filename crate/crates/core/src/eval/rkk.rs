//! Cardinality baseline: complexity is log₂ of the number of frequent terms,
//! and a language is compared with the most accurate system that uses the
//! same number of words.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2, ArrayView1};

use serde::{Deserialize, Serialize};

use super::gnid::gnid_or_identical;
use crate::error::{invalid, Result};
use crate::ib::{forward_chain, geometric_schedule, ib_objective, AnnealConfig, AnnealMode, Encoder, IBPoint, Prior};
use crate::meaning_space::MeaningSpace;
use crate::wcs::{frequent_term_count, mode_map};

/// Local search stops after this many full passes.
const POLISH_MAX_SWEEPS: usize = 1000;
/// Smallest accuracy gain, in nats, that counts as an improvement.
const POLISH_MIN_GAIN: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkkConfig {
    pub beta_max: f64,
    pub schedule_steps: usize,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RkkConfig {
    fn default() -> Self {
        Self {
            beta_max: 8192.0,
            schedule_steps: 200,
            restarts: 5,
            seed: 0,
            tol: crate::ib::DEFAULT_TOL,
            max_iter: crate::ib::DEFAULT_MAX_ITER,
        }
    }
}

/// Most accurate encoder found with at most `k` words.
#[derive(Debug, Clone)]
pub struct RkkOptimum {
    pub k: usize,
    pub encoder: Encoder,
    pub accuracy: f64,
    pub complexity: f64,
    /// False when no restart converged at the final β.
    pub converged: bool,
}

/// Anneal with the column count capped at `k` up to `beta_max`, keeping the
/// most accurate of the seeded restarts.
pub fn rkk_optimum(prior: &Prior, space: &MeaningSpace, k: usize, config: &RkkConfig) -> Result<RkkOptimum> {
    if k == 0 {
        return Err(invalid("word count must be at least 1"));
    }
    if k == 1 {
        let encoder = Encoder::single_word(prior);
        return Ok(RkkOptimum {
            k,
            encoder,
            accuracy: 0.0,
            complexity: 0.0,
            converged: true,
        });
    }
    let schedule = geometric_schedule(1.0, config.beta_max, config.schedule_steps.max(2))?;
    let mut best: Option<RkkOptimum> = None;
    for r in 0..config.restarts.max(1) {
        let mut cfg = AnnealConfig::new(schedule.clone(), k);
        cfg.mode = AnnealMode::Forward;
        cfg.tol = config.tol;
        cfg.max_iter = config.max_iter;
        cfg.seed = config
            .seed
            .wrapping_add(r as u64)
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(k as u64);
        // later restarts use stronger symmetry breaking to reach other basins
        cfg.perturbation = (cfg.perturbation * 3f64.powi(r as i32)).min(0.5);
        let chain = forward_chain(prior, space, &cfg)?;
        let last = chain.last().expect("schedule is nonempty");
        let polished = polish(prior, space, last.encoder.matrix(), k)?;
        let (encoder, point) = if polished.1.accuracy > last.accuracy {
            polished
        } else {
            let pt = ib_objective(&last.encoder, prior, space, 0.0)?;
            (last.encoder.clone(), pt)
        };
        let better = best.as_ref().is_none_or(|b| point.accuracy > b.accuracy);
        if better {
            best = Some(RkkOptimum {
                k,
                encoder,
                accuracy: point.accuracy,
                complexity: point.complexity,
                converged: last.converged,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Hard partition local search seeded by the mode map of `q`: move single
/// meanings between the `k` cells while I(Y;W) strictly improves. With the
/// word count capped, the accuracy optimum sits on a hard partition, which
/// annealing alone does not always reach.
fn polish(prior: &Prior, space: &MeaningSpace, q: &Array2<f64>, k: usize) -> Result<(Encoder, IBPoint)> {
    let p = prior.probs();
    let rows = space.rows();
    let (n, ny) = rows.dim();
    let py = p.dot(rows);
    let mut labels = mode_map(q).assignment;
    // cell sums s_w(y) = Σ_{m in w} p(m) m(y) and masses p(w)
    let mut cells = Array2::<f64>::zeros((k, ny));
    let mut mass = vec![0.0; k];
    for m in 0..n {
        cells.row_mut(labels[m]).scaled_add(p[m], &rows.row(m));
        mass[labels[m]] += p[m];
    }
    let term = |s: ArrayView1<'_, f64>, pw: f64| -> f64 {
        if pw <= 0.0 {
            return 0.0;
        }
        s.iter()
            .zip(&py)
            .filter(|(&v, _)| v > 0.0)
            .map(|(&v, &y)| v * (v / (pw * y)).ln())
            .sum()
    };
    let mut score: Vec<f64> = (0..k).map(|w| term(cells.row(w), mass[w])).collect();
    let mut scratch_a = Array1::<f64>::zeros(ny);
    let mut scratch_b = Array1::<f64>::zeros(ny);
    for _ in 0..POLISH_MAX_SWEEPS {
        let mut moved = false;
        for m in 0..n {
            let from = labels[m];
            if p[m] == 0.0 {
                continue;
            }
            scratch_a.assign(&cells.row(from));
            scratch_a.scaled_add(-p[m], &rows.row(m));
            scratch_a.mapv_inplace(|v| v.max(0.0));
            let from_mass = mass[from] - p[m];
            let from_score = term(scratch_a.view(), from_mass);
            let mut best: Option<(usize, f64)> = None;
            for to in (0..k).filter(|&w| w != from) {
                scratch_b.assign(&cells.row(to));
                scratch_b.scaled_add(p[m], &rows.row(m));
                let to_score = term(scratch_b.view(), mass[to] + p[m]);
                let gain = from_score + to_score - score[from] - score[to];
                if gain > POLISH_MIN_GAIN && best.is_none_or(|(_, g)| gain > g) {
                    best = Some((to, gain));
                }
            }
            if let Some((to, _)) = best {
                cells.row_mut(from).scaled_add(-p[m], &rows.row(m));
                cells.row_mut(to).scaled_add(p[m], &rows.row(m));
                mass[from] -= p[m];
                mass[to] += p[m];
                score[from] = term(cells.row(from), mass[from]);
                score[to] = term(cells.row(to), mass[to]);
                labels[m] = to;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    let mut hard = Array2::zeros((n, k));
    for (m, &w) in labels.iter().enumerate() {
        hard[[m, w]] = 1.0;
    }
    let encoder = Encoder::new(hard, prior)?;
    let point = ib_objective(&encoder, prior, space, 0.0)?;
    Ok((encoder, point))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkkScore {
    pub language_id: u32,
    pub k: usize,
    /// log₂ k.
    pub complexity: f64,
    /// A*_k − A_l, bits.
    pub epsilon: f64,
    pub gnid: f64,
    pub converged: bool,
}

/// Caches optima per word count for one (prior, space) pair.
pub struct RkkEvaluator<'a> {
    prior: &'a Prior,
    space: &'a MeaningSpace,
    config: RkkConfig,
    cache: BTreeMap<usize, RkkOptimum>,
}

impl<'a> RkkEvaluator<'a> {
    pub fn new(prior: &'a Prior, space: &'a MeaningSpace, config: RkkConfig) -> Self {
        Self {
            prior,
            space,
            config,
            cache: BTreeMap::new(),
        }
    }

    pub fn optimum(&mut self, k: usize) -> Result<&RkkOptimum> {
        if !self.cache.contains_key(&k) {
            let opt = rkk_optimum(self.prior, self.space, k, &self.config)?;
            self.cache.insert(k, opt);
        }
        Ok(&self.cache[&k])
    }

    pub fn evaluate(&mut self, language_id: u32, language: &Encoder) -> Result<RkkScore> {
        let k = frequent_term_count(language.matrix());
        let accuracy = ib_objective(language, self.prior, self.space, 0.0)?.accuracy;
        let prior = self.prior;
        let opt = self.optimum(k)?;
        let g = gnid_or_identical(language, &opt.encoder, prior)?;
        Ok(RkkScore {
            language_id,
            k,
            complexity: (k as f64).log2(),
            epsilon: opt.accuracy - accuracy,
            gnid: g,
            converged: opt.converged,
        })
    }
}
