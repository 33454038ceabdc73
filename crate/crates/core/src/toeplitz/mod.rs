//! Hermitian Toeplitz matrices parameterized by a real vector.
//!
//! A parameter `u` of length `2N - 1` defines the complexified first row
//! `u_C = (u_0, u_1 + i u_N, ..., u_{N-1} + i u_{2N-2})` and the matrix
//! `T(u)` with first row `(2 u_0, (u_C)_1, ..., (u_C)_{N-1})`. The adjoint
//! `T*` maps a Hermitian matrix to scaled sums along its upper diagonals so
//! that `trace(T(u) B) = T*(B)^T u`.
//!
//! Dense reference implementations live in [`dense`]; everything else runs
//! in `O(N^2)` or better.

pub mod dense;
mod levinson;

pub use levinson::{factorize, NotPositiveDefinite, ToeplitzFactorization};

use nalgebra::DMatrix;

use crate::fft::{embedding_len, lagged_products, FftPair};
use crate::{Error, Result, C64};

/// Real parameter vector of an `N x N` Hermitian Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzParam {
    n: usize,
    u: Vec<f64>,
}

impl ToeplitzParam {
    /// Wraps a parameter vector; its length must be `2N - 1` for some `N >= 1`.
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.len() % 2 == 0 {
            return Err(Error::DimensionMismatch {
                expected: u.len() + 1,
                found: u.len(),
            });
        }
        Ok(ToeplitzParam {
            n: (u.len() + 1) / 2,
            u,
        })
    }

    /// Parameter vector for an `n x n` matrix, checked against `2n - 1`.
    pub fn with_size(n: usize, u: Vec<f64>) -> Result<Self> {
        if n == 0 || u.len() != 2 * n - 1 {
            return Err(Error::DimensionMismatch {
                expected: (2 * n).saturating_sub(1),
                found: u.len(),
            });
        }
        Ok(ToeplitzParam { n, u })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix size must be positive");
        ToeplitzParam {
            n,
            u: vec![0.0; 2 * n - 1],
        }
    }

    /// `c * e_0`, i.e. `T = 2c I`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let mut p = Self::zeros(n);
        p.u[0] = c;
        p
    }

    /// Builds the parameter whose complexified form is `u_c`. The imaginary
    /// part of `u_c[0]` is ignored.
    pub fn from_complex(u_c: &[C64]) -> Self {
        let n = u_c.len();
        let mut p = Self::zeros(n);
        p.u[0] = u_c[0].re;
        for k in 1..n {
            p.u[k] = u_c[k].re;
            p.u[n - 1 + k] = u_c[k].im;
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.u
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.u
    }

    /// `u_C`; its first entry is `u_0` (not the diagonal `2 u_0`).
    pub fn complexified(&self) -> Vec<C64> {
        complexify(&self.u)
    }

    /// First row of `T(u)`.
    pub fn first_row(&self) -> Vec<C64> {
        let mut row = self.complexified();
        row[0] *= 2.0;
        row
    }

    /// `u + alpha * d`.
    pub fn offset(&self, alpha: f64, d: &[f64]) -> Self {
        debug_assert_eq!(d.len(), self.u.len());
        ToeplitzParam {
            n: self.n,
            u: self.u.iter().zip(d).map(|(a, b)| a + alpha * b).collect(),
        }
    }

    /// `u + c * e_0`, i.e. `T(u) + 2c I`.
    pub fn shift_diagonal(&self, c: f64) -> Self {
        let mut p = self.clone();
        p.u[0] += c;
        p
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.u.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// Dense `T(u)`. Intended for oracles and small `N`.
    pub fn build_dense(&self) -> DMatrix<C64> {
        let row = self.first_row();
        DMatrix::from_fn(self.n, self.n, |i, j| {
            if j >= i {
                row[j - i]
            } else {
                row[i - j].conj()
            }
        })
    }
}

/// Complexified form of a length-`2N - 1` real vector.
pub fn complexify(u: &[f64]) -> Vec<C64> {
    let n = (u.len() + 1) / 2;
    let mut c = Vec::with_capacity(n);
    c.push(C64::new(u[0], 0.0));
    for k in 1..n {
        c.push(C64::new(u[k], u[n - 1 + k]));
    }
    c
}

/// Packs upper-diagonal sums `beta` into `T*` layout:
/// `(2 beta_0, 2 Re beta_1.., 2 Im beta_1..)`.
pub(crate) fn pack_diagonal_sums(beta: &[C64]) -> Vec<f64> {
    let n = beta.len();
    let mut out = vec![0.0; 2 * n - 1];
    out[0] = 2.0 * beta[0].re;
    for k in 1..n {
        out[k] = 2.0 * beta[k].re;
        out[n - 1 + k] = 2.0 * beta[k].im;
    }
    out
}

/// `T*(B)` for a square (Hermitian) matrix, computed directly from its
/// upper diagonals.
pub fn adjoint(b: &DMatrix<C64>) -> Result<Vec<f64>> {
    if b.nrows() != b.ncols() {
        return Err(Error::NotSquare {
            rows: b.nrows(),
            cols: b.ncols(),
        });
    }
    let n = b.nrows();
    let beta: Vec<C64> = (0..n)
        .map(|k| (0..n - k).map(|m| b[(m, m + k)]).sum())
        .collect();
    Ok(pack_diagonal_sums(&beta))
}

/// `T*(phi phi^H)` via one FFT correlation.
pub fn rank1_adjoint(phi: &[C64]) -> Vec<f64> {
    let n = phi.len();
    let fft = FftPair::new(embedding_len(n));
    // beta_k = sum_m phi_m conj(phi_{m+k}) = conj(sum_m conj(phi_m) phi_{m+k})
    let beta: Vec<C64> = lagged_products(&fft, phi, phi, n)
        .into_iter()
        .map(|c| c.conj())
        .collect();
    pack_diagonal_sums(&beta)
}

/// `T*(a b^H + b a^H)` via FFT correlations.
pub fn outer_adjoint(a: &[C64], b: &[C64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len());
    let fft = FftPair::new(embedding_len(a.len()));
    outer_adjoint_with(&fft, &fft.forward_padded(b), a)
}

/// `T*(a b^H + b a^H)` given the forward transform of `b`. One forward and
/// one inverse transform of length `fft.len()`.
pub(crate) fn outer_adjoint_with(fft: &FftPair, b_hat: &[C64], a: &[C64]) -> Vec<f64> {
    let n = a.len();
    let len = fft.len();
    let mut c = fft.forward_padded(a);
    for (x, y) in c.iter_mut().zip(b_hat) {
        *x = x.conj() * y;
    }
    fft.inverse_in_place(&mut c);
    // c[k] = len * sum_m conj(a_m) b_{m+k}; the a b^H diagonal sums are conj(c[k]),
    // the b a^H ones are c[-k].
    let scale = 1.0 / len as f64;
    let beta: Vec<C64> = (0..n)
        .map(|k| (c[k].conj() + c[(len - k) % len]) * scale)
        .collect();
    pack_diagonal_sums(&beta)
}

/// Circulant embedding of a general `N x N` Toeplitz matrix, ready for
/// FFT matrix-vector products.
#[derive(Clone)]
pub(crate) struct ToeplitzKernel {
    n: usize,
    fft: FftPair,
    spectrum: Vec<C64>,
}

impl ToeplitzKernel {
    /// `col` is the first column, `row` the first row (`row[0]` is ignored).
    pub(crate) fn new(fft: &FftPair, col: &[C64], row: &[C64]) -> Self {
        let n = col.len();
        let len = fft.len();
        debug_assert!(len >= 2 * n - 1);
        let mut e = vec![C64::new(0.0, 0.0); len];
        e[..n].copy_from_slice(col);
        for k in 1..n {
            e[len - k] = row[k];
        }
        fft.forward_in_place(&mut e);
        ToeplitzKernel {
            n,
            fft: fft.clone(),
            spectrum: e,
        }
    }

    /// `M b` (or `M^H b` when `adjoint`).
    pub(crate) fn apply(&self, b: &[C64], adjoint: bool) -> Vec<C64> {
        let mut buf = self.fft.forward_padded(b);
        self.apply_spectrum(&mut buf, adjoint);
        buf
    }

    /// Same as [`apply`](Self::apply) with the input already transformed;
    /// `buf` holds the transform on entry and the length-`n` result on exit.
    pub(crate) fn apply_spectrum(&self, buf: &mut Vec<C64>, adjoint: bool) {
        if adjoint {
            buf.iter_mut()
                .zip(&self.spectrum)
                .for_each(|(x, s)| *x *= s.conj());
        } else {
            buf.iter_mut().zip(&self.spectrum).for_each(|(x, s)| *x *= s);
        }
        self.fft.inverse_in_place(buf);
        let scale = 1.0 / self.fft.len() as f64;
        buf.truncate(self.n);
        buf.iter_mut().for_each(|x| *x *= scale);
    }
}

/// `T(u) b` by circulant embedding.
pub fn matvec(u: &ToeplitzParam, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != u.n() {
        return Err(Error::DimensionMismatch {
            expected: u.n(),
            found: b.len(),
        });
    }
    let row = u.first_row();
    let col: Vec<C64> = row.iter().map(|c| c.conj()).collect();
    let fft = FftPair::new(embedding_len(u.n()));
    Ok(ToeplitzKernel::new(&fft, &col, &row).apply(b, false))
}

/// `T(e_m) b = (E_m + E_m^H) b` in `O(N)`.
pub(crate) fn basis_apply(n: usize, m: usize, b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    if m == 0 {
        out.iter_mut().zip(b).for_each(|(o, x)| *o = 2.0 * x);
        return out;
    }
    // Upper diagonal k carries c, lower diagonal carries conj(c).
    let (k, c) = if m < n {
        (m, C64::new(1.0, 0.0))
    } else {
        (m - n + 1, C64::new(0.0, 1.0))
    };
    for i in 0..n - k {
        out[i] += c * b[i + k];
        out[i + k] += c.conj() * b[i];
    }
    out
}
