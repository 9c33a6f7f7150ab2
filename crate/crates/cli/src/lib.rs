//! Command implementations and file formats behind the `rdmm` binary.

pub mod commands;
pub mod config;
pub mod report;

use thiserror::Error;

/// Command failures carrying their process exit code: 2 for configuration or
/// input errors, 3 for degenerate data, 4 when an entire sweep failed.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("all sweep points failed: {0}")]
    AllFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::AllFailed(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("invalid JSON: {e}"))
    }
}

impl From<rdmm_core::error::DataError> for CliError {
    fn from(e: rdmm_core::error::DataError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<rdmm_core::error::GenError> for CliError {
    fn from(e: rdmm_core::error::GenError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<rdmm_core::error::SearchError> for CliError {
    fn from(e: rdmm_core::error::SearchError) -> Self {
        use rdmm_core::error::SearchError;
        match e {
            SearchError::DegenerateDataset(msg) => CliError::Degenerate(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<rdmm_core::error::EvalError> for CliError {
    fn from(e: rdmm_core::error::EvalError) -> Self {
        use rdmm_core::error::EvalError;
        match e {
            EvalError::Search(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}
