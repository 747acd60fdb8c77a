//! Shared error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arithmetic left its domain: inverting zero, inverting a non-unit series.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A difference vector passed the congruence test but could not be broken
    /// into admissible strings. This contradicts the classification lemma and
    /// is treated as an internal consistency failure.
    #[error("classification failed: {0}")]
    Classification(String),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("shape violation: {0}")]
    Shape(String),

    #[error("budget exhausted after {examined} of {total} cases")]
    Budget { examined: u64, total: u64 },

    /// A result changed between two precision levels, so it cannot be
    /// certified at the requested truncation.
    #[error("precision insufficient: {0}")]
    Precision(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
