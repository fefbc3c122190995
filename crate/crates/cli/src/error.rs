use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config, arguments or input files.
    #[error("{0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<rsos_core::Error> for CliError {
    fn from(e: rsos_core::Error) -> Self {
        use rsos_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::UnsupportedOperation(_) => CliError::Invalid(e.to_string()),
            E::NumericalFailure { .. } | E::NormDrift { .. } | E::NonFinite(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Invalid(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(format!("json: {e}"))
    }
}

/// How a run ended when it produced its artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Done,
    NotConverged,
}

/// Exit code for a batch: errors outrank non-convergence, lower codes first.
pub fn batch_exit_code(results: &[Result<Status, CliError>]) -> ExitCode {
    let code = results
        .iter()
        .map(|r| match r {
            Ok(Status::Done) => 0,
            Ok(Status::NotConverged) => 3,
            Err(e) => e.exit_code(),
        })
        .filter(|&c| c != 0)
        .min()
        .unwrap_or(0);
    ExitCode::from(code)
}
