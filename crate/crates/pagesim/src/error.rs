//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by simulator components.
///
/// Validation errors (including the exact-oracle size guard) come from bad
/// user input and map to exit code 2 in the CLI; everything else is an
/// internal misuse or environment failure and maps to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input: bad page id, bad parameter, bad file
    /// contents.
    #[error("validation: {0}")]
    Validation(String),

    /// A call sequence broke an operation's contract: wrong evictee on a
    /// miss, an eviction choice supplied on a hit, a remedy-table round
    /// discontinuity, a mismatched learner update.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A predictor query violated the configured access model.
    #[error("access violation: {0}")]
    AccessViolation(String),

    /// An exact-oracle instance exceeds its size guard.
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    /// I/O failure, always with file context.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad input rather than internal misuse.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::InstanceTooLarge(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
