//! Command-line front end for `harnack-core`.
//!
//! Every command returns its stdout as a string together with an exit code;
//! `main` only prints. Exit codes: 0 success, 1 inconsistent sandwich
//! report, 2 bad input (unparseable files, exterior points, bad arguments),
//! 3 grid solvers refused the dimension.

pub mod args;
pub mod commands;
pub mod format;
pub mod input;
pub mod plot;
pub mod report;

use harnack_core::HarnackError;
use thiserror::Error;

pub use args::Cli;
pub use commands::{run, Output};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] HarnackError),
    #[error("{0}")]
    Unsupported(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(HarnackError::GridDimensionUnsupported { .. }) | CliError::Unsupported(_) => 3,
            CliError::Core(_) => 2,
        }
    }
}
