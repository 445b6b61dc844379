use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inputs violate an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),

    /// Points from two different space models were mixed.
    #[error("model mismatch: expected {expected}, found {found}")]
    ModelMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// A numeric routine could not produce a value (singular system, NaN, ...).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Writing an export failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn io(e: impl std::fmt::Display) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
