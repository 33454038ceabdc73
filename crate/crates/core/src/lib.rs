//! Fast primal-dual interior-point solver for atomic norm soft thresholding
//! (AST), the convex relaxation used for gridless line spectral estimation.
//!
//! The AST semidefinite program
//!
//! ```text
//! minimize    ||x - y||^2 + tau * (v + w^T u)
//! subject to  [[T(u), x], [x^H, v]] >= 0
//! ```
//!
//! is treated as a non-symmetric conic program over `mu = (v, x, u)`, which
//! keeps the dual at `O(N)` variables and preserves the Hermitian Toeplitz
//! structure of `T(u)`. Every step of the method reduces to Levinson-Durbin
//! factorizations and FFT-accelerated Toeplitz products.
//!
//! Module map:
//! - [`toeplitz`]: `T(u)`, its adjoint, Levinson-Durbin / Gohberg-Semencul
//!   factorization and the structured kernels built on it.
//! - [`cones`]: membership oracles for the primal cone and its dual.
//! - [`objective`]: the reduced barrier objective `h_t(u)` with gradients and
//!   Hessians.
//! - [`solver`]: the interior-point driver with Newton and modified L-BFGS
//!   search directions.
//! - [`lse`]: line spectral estimation on top of the solver (regularization
//!   choice, frequency extraction, debiasing, metrics).

pub mod cones;
mod error;
pub(crate) mod fft;
pub mod lse;
pub mod objective;
pub mod solver;
pub mod toeplitz;

pub use error::{Error, Result};
pub use cones::{DualPoint, PrimalPoint};
pub use num_complex::Complex64 as C64;
pub use objective::{Gradients, Iterate, ObjectiveContext};
pub use solver::{solve, solve_ast, SolverConfig, SolverResult, Status, Variant};
pub use toeplitz::{NotPositiveDefinite, ToeplitzFactorization, ToeplitzParam};
