//! Batch pipeline behind the `ibcolor` binary: ingestion of survey files,
//! IB curve construction, language evaluation, cross-validation and plot
//! data export. Every command reads and writes files under one output
//! directory.

pub mod commands;
pub mod config;

use std::fmt;

pub use commands::{cmd_crossval, cmd_curve, cmd_eval, cmd_export, cmd_ingest};
pub use config::{Overrides, RunConfig};

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Input = 2,
    Convergence = 3,
    MissingArtifact = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Input,
            message: msg.into(),
        }
    }

    pub fn convergence(msg: impl Into<String>) -> Self {
        Self {
            code: ExitCode::Convergence,
            message: msg.into(),
        }
    }

    pub fn missing(msg: impl Into<String>) -> Self {
        Self {
            code: ExitCode::MissingArtifact,
            message: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ibcolor::Error> for CliError {
    fn from(e: ibcolor::Error) -> Self {
        CliError::input(e.to_string())
    }
}
