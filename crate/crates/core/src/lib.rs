//! Information Bottleneck analysis of color naming.
//!
//! The pipeline: parse survey data into per-language naming distributions
//! ([`wcs`]), build Gaussian meanings over a CIELAB palette
//! ([`meaning_space`]), estimate a shared source distribution ([`priors`]),
//! trace the optimal complexity/accuracy tradeoff ([`ib`]), and score
//! languages against it ([`eval`]).

pub mod error;
pub mod eval;
pub mod ib;
pub mod info;
pub mod meaning_space;
pub mod priors;
pub mod synthetic;
pub mod wcs;

pub use error::{Error, Result};
