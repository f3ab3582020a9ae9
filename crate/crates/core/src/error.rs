//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("inconsistent integral data: {0}")]
    Consistency(String),

    #[error("degenerate denominator: {0}")]
    Degeneracy(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("pauli strings do not mutually commute: {0}")]
    NonCommuting(String),

    #[error("parameter arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("operator is not hermitian: {0}")]
    Hermiticity(String),

    #[error("symmetry-sector mismatch: {0}")]
    Sector(String),

    #[error("excitation rank not supported: {0}")]
    Rank(String),

    #[error("ambiguous determinant mapping: {0}")]
    Ambiguity(String),

    #[error("invalid scatterer pairing: {0}")]
    Pairing(String),

    #[error("unusable training set: {0}")]
    EmptyTraining(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("optimizer/noise mode mismatch: {0}")]
    Mode(String),

    #[error("resource guard exceeded: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
