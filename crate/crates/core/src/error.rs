use thiserror::Error;

/// Errors produced by the library.
///
/// The variants map onto three classes a caller usually needs to tell apart:
/// invalid input ([`Error::InvalidDeck`], [`Error::OutOfDomain`],
/// [`Error::InvalidParameter`]), refused work ([`Error::CapExceeded`]) and a
/// failed internal cross-check ([`Error::Verification`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid deck composition (m1 = {m1}, m2 = {m2}): the majority count m1 must be at least m2")]
    InvalidDeck { m1: u64, m2: u64 },

    #[error("argument outside the domain of {operation}: {detail}")]
    OutOfDomain {
        operation: &'static str,
        detail: String,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("{what} of {requested} exceeds the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn domain(operation: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfDomain {
            operation,
            detail: detail.into(),
        }
    }

    pub(crate) fn parameter(name: &'static str, value: impl ToString, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason,
        }
    }

    /// True for errors that signal a refusal on resource grounds.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
