use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fit::{fit_beta, fit_beta_constrained, LanguageFit};
use super::rkk::{RkkConfig, RkkEvaluator, RkkScore};
use crate::error::{invalid, Result};
use crate::ib::{anneal_curve, AnnealConfig, IBCurve, Prior};
use crate::meaning_space::MeaningSpace;
use crate::priors::{average_source, LanguagePrior};
use crate::wcs::LanguageEncoder;

/// Negative ΔF or ε beyond this is reported as a curve defect.
const SUBOPTIMAL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub anneal: AnnealConfig,
    pub rkk: RkkConfig,
}

/// Scores of one language under the three principles. A `None` score comes
/// with an entry in `flags` saying why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanguageEval {
    pub language_id: u32,
    pub fold: usize,
    pub ib: Option<LanguageFit>,
    pub cib: Option<LanguageFit>,
    pub rkk: Option<RkkScore>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Principle {
    #[serde(rename = "IB")]
    Ib,
    #[serde(rename = "C-IB")]
    ConstrainedIb,
    #[serde(rename = "RKK+")]
    RkkPlus,
}

impl Principle {
    pub const ALL: [Principle; 3] = [Principle::Ib, Principle::ConstrainedIb, Principle::RkkPlus];

    pub fn label(self) -> &'static str {
        match self {
            Principle::Ib => "IB",
            Principle::ConstrainedIb => "C-IB",
            Principle::RkkPlus => "RKK+",
        }
    }

    fn scores(self, e: &LanguageEval) -> Option<(f64, f64)> {
        match self {
            Principle::Ib => e.ib.as_ref().map(|f| (f.epsilon, f.gnid)),
            Principle::ConstrainedIb => e.cib.as_ref().map(|f| (f.epsilon, f.gnid)),
            Principle::RkkPlus => e.rkk.as_ref().filter(|r| r.converged).map(|r| (r.epsilon, r.gnid)),
        }
    }
}

/// Mean ± sample standard deviation of ε and gNID for one principle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipleSummary {
    pub principle: Principle,
    pub epsilon_mean: f64,
    pub epsilon_sd: f64,
    pub gnid_mean: f64,
    pub gnid_sd: f64,
    pub n: usize,
    /// Evaluations left out of the means because they were flagged.
    pub excluded: usize,
}

pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summarize(entries: &[LanguageEval]) -> Vec<PrincipleSummary> {
    Principle::ALL
        .iter()
        .map(|&principle| {
            let scored: Vec<(f64, f64)> = entries.iter().filter_map(|e| principle.scores(e)).collect();
            let eps: Vec<f64> = scored.iter().map(|s| s.0).collect();
            let gn: Vec<f64> = scored.iter().map(|s| s.1).collect();
            let (epsilon_mean, epsilon_sd) = mean_sd(&eps);
            let (gnid_mean, gnid_sd) = mean_sd(&gn);
            PrincipleSummary {
                principle,
                epsilon_mean,
                epsilon_sd,
                gnid_mean,
                gnid_sd,
                n: scored.len(),
                excluded: entries.len() - scored.len(),
            }
        })
        .collect()
}

/// Score every language against one curve and source.
pub fn evaluate_languages(
    languages: &[&LanguageEncoder],
    curve: &IBCurve,
    prior: &Prior,
    space: &MeaningSpace,
    rkk: &RkkConfig,
    fold: usize,
) -> Result<Vec<LanguageEval>> {
    let mut baseline = RkkEvaluator::new(prior, space, rkk.clone());
    let mut out = Vec::with_capacity(languages.len());
    for lang in languages {
        let id = lang.language_id;
        let encoder = lang.to_encoder(prior)?;
        let mut flags = Vec::new();
        let ib = match fit_beta(id, &encoder, curve, prior, space) {
            Ok(f) => Some(f),
            Err(e) => {
                flags.push(format!("IB: {e}"));
                None
            }
        };
        let cib = match fit_beta_constrained(id, &encoder, curve, prior, space) {
            Ok(f) => Some(f),
            Err(e) => {
                flags.push(format!("C-IB: {e}"));
                None
            }
        };
        // a language beating the curve means the curve is not optimal there
        for (label, fit) in [("IB", &ib), ("C-IB", &cib)] {
            if let Some(f) = fit
                .as_ref()
                .filter(|f| f.delta_f < -SUBOPTIMAL_SLACK || f.epsilon < -SUBOPTIMAL_SLACK)
            {
                log::warn!("language {id} lies below the {label} curve (dF {:e})", f.delta_f);
                flags.push(format!("{label}: language beats the curve by {:e} bits", -f.epsilon));
            }
        }
        let rkk = match baseline.evaluate(id, &encoder) {
            Ok(r) => {
                if !r.converged {
                    flags.push("RKK+: solver did not converge".into());
                }
                Some(r)
            }
            Err(e) => {
                flags.push(format!("RKK+: {e}"));
                None
            }
        };
        log::info!("fold {fold}: language {id} scored");
        out.push(LanguageEval {
            language_id: id,
            fold,
            ib,
            cib,
            rkk,
            flags,
        });
    }
    Ok(out)
}

/// Fold index per language id, in ascending id order: ids are shuffled by
/// a seeded permutation and dealt round-robin.
pub fn fold_assignment(ids: &[u32], folds: usize, seed: u64) -> Result<Vec<(u32, usize)>> {
    if folds == 0 {
        return Err(invalid("folds must be at least 1"));
    }
    if ids.len() < folds {
        return Err(invalid(format!("{} languages cannot fill {folds} folds", ids.len())));
    }
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    let mut order = sorted.clone();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment: Vec<(u32, usize)> = order.iter().enumerate().map(|(i, &id)| (id, i % folds)).collect();
    assignment.sort_unstable();
    Ok(assignment)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValReport {
    pub folds: usize,
    pub seed: u64,
    pub assignment: Vec<(u32, usize)>,
    pub entries: Vec<LanguageEval>,
    pub per_fold: Vec<Vec<PrincipleSummary>>,
    pub summary: Vec<PrincipleSummary>,
}

/// k-fold cross-validation over languages. With `folds == 1` every language
/// is both trained on and evaluated.
pub fn cross_validate(
    languages: &[LanguageEncoder],
    priors: &[LanguagePrior],
    space: &MeaningSpace,
    config: &EvalConfig,
    folds: usize,
    seed: u64,
) -> Result<CrossValReport> {
    cross_validate_with(languages, priors, space, config, folds, seed, &mut |_, prior| {
        anneal_curve(prior, space, &config.anneal)
    })
}

/// As [`cross_validate`], with the per-fold curve supplied by `build_curve`
/// (called with the fold index and the fold's training source).
pub fn cross_validate_with(
    languages: &[LanguageEncoder],
    priors: &[LanguagePrior],
    space: &MeaningSpace,
    config: &EvalConfig,
    folds: usize,
    seed: u64,
    build_curve: &mut dyn FnMut(usize, &Prior) -> Result<IBCurve>,
) -> Result<CrossValReport> {
    let ids: Vec<u32> = languages.iter().map(|l| l.language_id).collect();
    let assignment = fold_assignment(&ids, folds, seed)?;
    let fold_of = |id: u32| assignment.iter().find(|(i, _)| *i == id).map(|&(_, f)| f).unwrap_or(0);
    let prior_of = |id: u32| priors.iter().find(|p| p.language_id == id);

    let mut entries = Vec::new();
    let mut per_fold = Vec::with_capacity(folds);
    for fold in 0..folds {
        let (train, test): (Vec<&LanguageEncoder>, Vec<&LanguageEncoder>) = if folds == 1 {
            (languages.iter().collect(), languages.iter().collect())
        } else {
            languages.iter().partition(|l| fold_of(l.language_id) != fold)
        };
        let train_priors: Vec<LanguagePrior> = train
            .iter()
            .map(|l| {
                prior_of(l.language_id)
                    .cloned()
                    .ok_or_else(|| invalid(format!("no prior for language {}", l.language_id)))
            })
            .collect::<Result<_>>()?;
        let source = average_source(&train_priors)?.to_prior()?;
        log::info!("fold {fold}: {} training, {} held out", train.len(), test.len());
        let curve = build_curve(fold, &source)?;
        let fold_entries = evaluate_languages(&test, &curve, &source, space, &config.rkk, fold)?;
        per_fold.push(summarize(&fold_entries));
        entries.extend(fold_entries);
    }
    entries.sort_by_key(|e| e.language_id);
    let summary = summarize(&entries);
    Ok(CrossValReport {
        folds,
        seed,
        assignment,
        entries,
        per_fold,
        summary,
    })
}
