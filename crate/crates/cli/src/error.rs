//! Error type carrying the process exit code contract.

use thiserror::Error;

/// Exit codes: 1 usage, 2 I/O, 3 invalid parameter value.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Param(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Param(_) => 3,
        }
    }
}
