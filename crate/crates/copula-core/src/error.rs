//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CopulaError {
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid shuffle: {0}")]
    InvalidShuffle(String),
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("invalid diagonal: {0}")]
    InvalidDiagonal(String),
    #[error("invalid ordinal sum: {0}")]
    InvalidOrdinalSum(String),
    #[error("copula is not doubly symmetric: deviation {max_dev:.3e} at ({u}, {v})")]
    NotDoublySymmetric { max_dev: f64, u: f64, v: f64 },
    #[error("grid parameter m = {0} must be a positive even integer")]
    OddGrid(usize),
    #[error("exact path unsupported for {0}")]
    UnsupportedExact(&'static str),
    #[error("quadrature tolerance {tol:.1e} not reached (residual {residual:.3e})")]
    ToleranceNotReached { tol: f64, residual: f64 },
    #[error("orbit at segment {index} is not steppable: {reason}")]
    NonSteppable { index: usize, reason: String },
    #[error("reduction exceeded {0} steps without reaching q = 1")]
    StepLimit(usize),
    #[error("curve piece index for x = {x} exceeds {max}")]
    PieceIndexOverflow { x: f64, max: usize },
    #[error("descriptor error: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, CopulaError>;
