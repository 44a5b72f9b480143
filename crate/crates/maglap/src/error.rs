//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A boundary curve that is not admissible (wrong orientation,
    /// self-intersecting, degenerate tangent, or non-positive area).
    #[error("inadmissible curve: {0}")]
    Inadmissible(String),

    /// A numerical procedure failed to converge or lost too much accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An eigenvalue search could not account for all requested eigenvalues.
    #[error("missed eigenvalues: {0}")]
    MissedEigenvalues(String),

    /// Invalid user-facing configuration or input data.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
