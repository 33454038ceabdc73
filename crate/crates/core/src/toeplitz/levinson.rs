use nalgebra::DMatrix;
use thiserror::Error;

use super::{pack_diagonal_sums, ToeplitzKernel, ToeplitzParam};
use crate::fft::{embedding_len, lagged_products, FftPair};
use crate::{Error, Result, C64};

/// Returned by [`factorize`] when `T(u)` is not positive definite. This is an
/// ordinary outcome: line searches probe points outside the cone on purpose.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("Toeplitz matrix is not positive definite (pivot {order} is not positive)")]
pub struct NotPositiveDefinite {
    /// Index of the first non-positive pivot.
    pub order: usize,
}

/// Levinson-Durbin factorization of a positive definite `T(u)`.
///
/// Holds the pivots `delta_n` (prediction error powers of the leading
/// principal submatrices), the Gohberg-Semencul coefficients `rho` (the
/// order `N - 1` backward predictor, `rho[N-1] = 1`) giving
///
/// ```text
/// T^{-1} = (U^H U - V V^H) / delta_{N-1},   U[n][m] = rho[N-1+n-m],  V[n][m] = rho[n-m-1]
/// ```
///
/// and optionally the unit upper triangular `P` with `T^{-1} = P D P^H`,
/// `D = diag(1 / delta_n)`.
#[derive(Clone)]
pub struct ToeplitzFactorization {
    n: usize,
    pivots: Vec<f64>,
    gs_coeffs: Vec<C64>,
    chol: Option<DMatrix<C64>>,
    fft: FftPair,
    upper: ToeplitzKernel,
    lower: ToeplitzKernel,
}

impl std::fmt::Debug for ToeplitzFactorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzFactorization")
            .field("n", &self.n)
            .field("pivots", &self.pivots)
            .field("gs_coeffs", &self.gs_coeffs)
            .field("has_cholesky", &self.chol.is_some())
            .finish()
    }
}

/// Levinson-Durbin recursion in `O(N^2)`. With `want_cholesky` the columns
/// of `P` (the backward predictors of every order) are kept as well.
pub fn factorize(
    u: &ToeplitzParam,
    want_cholesky: bool,
) -> Result<ToeplitzFactorization, NotPositiveDefinite> {
    let n = u.n();
    let row = u.first_row();

    let mut delta = row[0].re;
    if !(delta > 0.0) {
        return Err(NotPositiveDefinite { order: 0 });
    }
    let mut pivots = Vec::with_capacity(n);
    pivots.push(delta);

    let mut chol = want_cholesky.then(|| DMatrix::<C64>::zeros(n, n));
    if let Some(p) = chol.as_mut() {
        p[(0, 0)] = C64::new(1.0, 0.0);
    }

    // Forward predictor a (a[0] = 1); the backward predictor is its
    // conjugate reversal.
    let mut a: Vec<C64> = Vec::with_capacity(n);
    a.push(C64::new(1.0, 0.0));
    for order in 0..n - 1 {
        let eps: C64 = (0..=order).map(|j| row[order + 1 - j].conj() * a[j]).sum();
        let k = -eps / delta;
        let next = delta - eps.norm_sqr() / delta;

        a.push(C64::new(0.0, 0.0));
        let last = order + 1;
        for j in 0..=last / 2 {
            let (lo, hi) = (a[j], a[last - j]);
            a[j] = lo + k * hi.conj();
            if j != last - j {
                a[last - j] = hi + k * lo.conj();
            }
        }

        if !(next > 0.0) {
            return Err(NotPositiveDefinite { order: order + 1 });
        }
        delta = next;
        pivots.push(delta);

        if let Some(p) = chol.as_mut() {
            for i in 0..=last {
                p[(i, last)] = a[last - i].conj();
            }
        }
    }

    let gs_coeffs: Vec<C64> = (0..n).map(|i| a[n - 1 - i].conj()).collect();

    let fft = FftPair::new(embedding_len(n));
    let zero = C64::new(0.0, 0.0);
    let mut u_col = vec![zero; n];
    u_col[0] = gs_coeffs[n - 1];
    let u_row: Vec<C64> = (0..n).map(|m| gs_coeffs[n - 1 - m]).collect();
    let mut v_col = vec![zero; n];
    v_col[1..].copy_from_slice(&gs_coeffs[..n - 1]);
    let v_row = vec![zero; n];

    Ok(ToeplitzFactorization {
        n,
        upper: ToeplitzKernel::new(&fft, &u_col, &u_row),
        lower: ToeplitzKernel::new(&fft, &v_col, &v_row),
        fft,
        pivots,
        gs_coeffs,
        chol,
    })
}

impl ToeplitzFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn gs_coeffs(&self) -> &[C64] {
        &self.gs_coeffs
    }

    /// Unit upper triangular `P` of `T^{-1} = P D P^H`, when requested.
    pub fn cholesky_factor(&self) -> Option<&DMatrix<C64>> {
        self.chol.as_ref()
    }

    fn last_pivot(&self) -> f64 {
        self.pivots[self.n - 1]
    }

    /// `log det T(u) = sum_n log delta_n`.
    pub fn logdet(&self) -> f64 {
        self.pivots.iter().map(|d| d.ln()).sum()
    }

    /// `T^{-1}(u) b` from the Gohberg-Semencul form, four FFT Toeplitz products.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        Ok(self.solve_unchecked(b))
    }

    pub(crate) fn solve_unchecked(&self, b: &[C64]) -> Vec<C64> {
        let b_hat = self.fft.forward_padded(b);

        let mut ub = b_hat.clone();
        self.upper.apply_spectrum(&mut ub, false);
        let first = self.upper.apply(&ub, true);

        let mut vb = b_hat;
        self.lower.apply_spectrum(&mut vb, true);
        let second = self.lower.apply(&vb, false);

        let scale = 1.0 / self.last_pivot();
        first
            .iter()
            .zip(&second)
            .map(|(p, q)| (p - q) * scale)
            .collect()
    }

    /// `T*(T^{-1}(u))`: diagonal sums of the inverse from two correlations of
    /// the Gohberg-Semencul coefficients,
    /// `beta_n = sum_k (n - N + 2(k+1)) rho_k conj(rho_{k+n}) / delta_{N-1}`.
    pub fn trace_of_inverse_diagonals(&self) -> Vec<f64> {
        let n = self.n;
        let rho = &self.gs_coeffs;
        let weighted: Vec<C64> = rho.iter().enumerate().map(|(k, r)| r * k as f64).collect();
        // lagged_products gives sum_k conj(a_k) b_{k+n}; we need the conjugate.
        let plain = lagged_products(&self.fft, rho, rho, n);
        let ramp = lagged_products(&self.fft, &weighted, rho, n);
        let scale = 1.0 / self.last_pivot();
        let beta: Vec<C64> = (0..n)
            .map(|lag| {
                let base = lag as f64 - n as f64 + 2.0;
                (plain[lag].conj() * base + ramp[lag].conj() * 2.0) * scale
            })
            .collect();
        pack_diagonal_sums(&beta)
    }

    /// Visits one persymmetric wedge of the upper triangle of `T^{-1}`:
    /// `f(m, lag, value)` for `value = T^{-1}[m][m+lag]` with
    /// `m <= (N - 1 - lag) / 2`. Each entry is built as a running sum along
    /// its diagonal, `O(N^2 / 4)` overall.
    fn for_each_wedge_entry(&self, mut f: impl FnMut(usize, usize, C64)) {
        let n = self.n;
        let rho = &self.gs_coeffs;
        let scale = 1.0 / self.last_pivot();
        for lag in 0..n {
            let len = n - lag;
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..=(len - 1) / 2 {
                acc += rho[n - 1 - m].conj() * rho[n - 1 - m - lag];
                if m >= 1 {
                    acc -= rho[m - 1] * rho[m + lag - 1].conj();
                }
                f(m, lag, acc * scale);
            }
        }
    }

    /// Dense `T^{-1}(u)` in `O(N^2)`, exploiting that the inverse of a
    /// Hermitian Toeplitz matrix is Hermitian and persymmetric.
    pub fn explicit_inverse(&self) -> DMatrix<C64> {
        let n = self.n;
        let mut x = DMatrix::<C64>::zeros(n, n);
        self.for_each_wedge_entry(|m, lag, val| {
            let mirror = n - 1 - lag - m;
            x[(m, m + lag)] = val;
            x[(mirror, mirror + lag)] = val;
            x[(m + lag, m)] = val.conj();
            x[(mirror + lag, mirror)] = val.conj();
        });
        x
    }

    /// `trace(T^{-1} T^{-1}) = sum |T^{-1}_{ij}|^2` without forming the matrix.
    pub fn trace_inv_sq(&self) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        self.for_each_wedge_entry(|m, lag, val| {
            let mirror = n - 1 - lag - m;
            let copies = if mirror == m { 1.0 } else { 2.0 };
            let sym = if lag == 0 { 1.0 } else { 2.0 };
            total += copies * sym * val.norm_sqr();
        });
        total
    }
}
