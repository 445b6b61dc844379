//! Config-driven runner for `hm-core`: trajectory runs with rate reports,
//! exact rate evaluation, and verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

pub mod config;
pub mod rates;
pub mod run;
pub mod verify;

use thiserror::Error;

pub use config::{RunConfig, Scheme, SCHEMA_VERSION};
pub use rates::{cmd_rates, RatesArgs};
pub use run::{cmd_run, RunOutcome};
pub use verify::{cmd_verify, SUITES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<hm_core::Error> for CliError {
    fn from(e: hm_core::Error) -> Self {
        match e {
            hm_core::Error::Io(m) => CliError::Io(std::io::Error::other(m)),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("bad JSON: {e}"))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
