//! Crate-wide error type.
//!
//! The variants mirror the failure taxonomy of the experiment runner: schema
//! and validation problems, exhausted enumeration budgets, precision
//! exhaustion in certified arithmetic, degenerate inputs, and falsification
//! events (a measurement contradicting a claimed identity).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("validation: {0}")]
    Validation(String),

    /// An enumeration or sampling budget was exceeded; results are partial.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Certified arithmetic could not reach the requested precision.
    #[error("precision exhausted: {0}")]
    Precision(String),

    /// The operation is undefined for this input (division by zero, exact
    /// degeneracies, unsupported shapes).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A certificate could not be decided either way.
    #[error("undecided: {0}")]
    Undecided(String),

    /// A verified identity failed; this is the outcome the laboratory exists
    /// to surface, never to be swallowed.
    #[error("falsification: {0}")]
    Falsification(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }
    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }
    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
    pub fn undecided(msg: impl Into<String>) -> Self {
        Error::Undecided(msg.into())
    }
    pub fn falsification(msg: impl Into<String>) -> Self {
        Error::Falsification(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
