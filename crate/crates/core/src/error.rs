use thiserror::Error;

use crate::toeplitz::NotPositiveDefinite;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error(transparent)]
    NotPositiveDefinite(#[from] NotPositiveDefinite),

    #[error("problem is not solvable: {0}")]
    NotSolvable(&'static str),

    #[error("initialization did not reach a dual feasible point after {0} doublings")]
    InitializationFailed(usize),

    #[error("Hessian is numerically indefinite at iteration {iteration}")]
    IndefiniteHessian { iteration: usize },

    #[error("full Hessian requires a factorization with Cholesky columns")]
    MissingCholesky,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
