//! Scoring natural languages against the IB limit.

mod crossval;
pub mod export;
mod fit;
mod gnid;
mod rkk;

pub use crossval::{
    cross_validate, cross_validate_with, evaluate_languages, fold_assignment, mean_sd, summarize, CrossValReport,
    EvalConfig, LanguageEval, Principle, PrincipleSummary,
};
pub use fit::{fit_beta, fit_beta_constrained, LanguageFit};
pub use gnid::gnid;
pub use rkk::{rkk_optimum, RkkConfig, RkkEvaluator, RkkOptimum, RkkScore};
