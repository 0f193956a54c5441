use std::process::ExitCode;

use thiserror::Error;
use wade_core::WadeError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, missing files, unreadable or invalid input data.
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(#[source] WadeError),
    #[error("computation failed: {0}")]
    Compute(#[source] WadeError),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) | CliError::Input(_) => ExitCode::from(2),
            CliError::Compute(_) | CliError::Output(_) => ExitCode::from(1),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub trait InputContext<T> {
    fn input(self) -> CliResult<T>;
    fn compute(self) -> CliResult<T>;
}

impl<T> InputContext<T> for Result<T, WadeError> {
    fn input(self) -> CliResult<T> {
        self.map_err(CliError::Input)
    }

    fn compute(self) -> CliResult<T> {
        self.map_err(CliError::Compute)
    }
}
