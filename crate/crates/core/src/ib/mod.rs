//! The IB solver: information quantities of an encoder, the Bayesian
//! listener, self-consistent iterations, and annealing along β.

mod anneal;
mod encoder;
mod objective;
pub mod persist;
mod solver;

pub use anneal::{
    anneal_curve, forward_chain, geometric_schedule, reverse_chain, AnnealConfig, AnnealMode, Candidate, IBCurve,
};
pub use encoder::{bayesian_decoder, Decoder, Encoder, Prior, DEAD_WORD};
pub use objective::{
    accuracy, complexity, effective_lexicon_size, expected_distortion, ib_objective, meaning_information, IBPoint,
    DEFAULT_MERGE_TOL,
};
pub use solver::{fixed_point_step, solve_ib, Solution, DEFAULT_MAX_ITER, DEFAULT_TOL};
