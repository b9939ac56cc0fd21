//! Command implementations behind the `single-ur` binary.
//!
//! Every command writes its report to a caller-supplied writer and returns
//! an [`Outcome`]; the binary maps outcomes and errors to exit codes.

pub mod commands;
pub mod instance;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_MAXIMALLY_MIXED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_VALIDATION: i32 = 65;
pub const EXIT_IO: i32 = 66;

/// Bound violations below this slack fail a command.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violation,
    MaximallyMixed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => EXIT_OK,
            Outcome::Violation => EXIT_VIOLATION,
            Outcome::MaximallyMixed => EXIT_MAXIMALLY_MIXED,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
