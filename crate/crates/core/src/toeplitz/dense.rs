//! Dense `O(N^3)` reference computations.
//!
//! These are the independent oracles the fast structured kernels are tested
//! against. They are public so that downstream test suites can use them;
//! the solver itself never calls into this module.

use nalgebra::{DMatrix, DVector};

use super::{ToeplitzParam};
use crate::C64;

/// `M^{-1}` via LU, `None` when singular.
pub fn inverse(m: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    m.clone().try_inverse()
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `log det M` of a Hermitian matrix from its eigenvalues; `None` unless all
/// are positive.
pub fn logdet(m: &DMatrix<C64>) -> Option<f64> {
    let ev = hermitian_eigenvalues(m);
    ev.iter().all(|&e| e > 0.0).then(|| ev.iter().map(|e| e.ln()).sum())
}

/// PSD test with an absolute eigenvalue tolerance.
pub fn is_psd(m: &DMatrix<C64>, tol: f64) -> bool {
    min_eigenvalue(m) >= -tol
}

pub fn matvec(m: &DMatrix<C64>, b: &[C64]) -> Vec<C64> {
    (m * DVector::from_column_slice(b)).iter().copied().collect()
}

/// `(U^H U - V V^H) / delta_{N-1}` assembled densely from the coefficients.
pub fn gohberg_semencul_inverse(pivots: &[f64], rho: &[C64]) -> DMatrix<C64> {
    let n = rho.len();
    let at = |k: isize| -> C64 {
        if (0..n as isize).contains(&k) {
            rho[k as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let u = DMatrix::from_fn(n, n, |i, j| at(n as isize - 1 + i as isize - j as isize));
    let v = DMatrix::from_fn(n, n, |i, j| at(i as isize - j as isize - 1));
    (u.adjoint() * &u - &v * v.adjoint()) / C64::new(pivots[n - 1], 0.0)
}

/// Dense `T(e_m) = E_m + E_m^H`.
pub fn basis_matrix(n: usize, m: usize) -> DMatrix<C64> {
    let mut e = vec![0.0; 2 * n - 1];
    e[m] = 1.0;
    ToeplitzParam::with_size(n, e)
        .expect("basis index in range")
        .build_dense()
}

/// `trace(A^H B)`.
pub fn inner(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
