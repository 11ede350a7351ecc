//! Error type shared across the crate.
//!
//! Validation failures, work-budget rejections and non-convergence are kept
//! as distinct variants because the CLI maps them to distinct exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric: A[{i}][{j}] != A[{j}][{i}]")]
    NotSymmetric { i: usize, j: usize },

    #[error("diagonal entry A[{i}][{i}] is odd; the even-diagonal invariant is violated")]
    OddDiagonal { i: usize },

    #[error("form is degenerate: det A = 0")]
    Degenerate,

    #[error("dimension must be >= 3, got {got}")]
    DimensionTooSmall { got: usize },

    #[error("shift component {i} = {value} is not on the lattice Z^d/L")]
    OffLattice { i: usize, value: String },

    #[error("{what} must be an integer, got {value}")]
    NotInteger { what: &'static str, value: String },

    #[error("work budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("did not converge within {limit} terms (partial value {partial})")]
    NotConverged { limit: u64, partial: f64 },

    #[error("closed form applies only to the split form F_d with even d (got d = {got})")]
    ClosedFormUnavailable { got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 3,
            Error::NotConverged { .. } => 4,
            _ => 2,
        }
    }
}
