//! The barrier objective `h_t(u) = g(u) + G(u) / t` minimized in each
//! interior-point iteration, with
//!
//! - `g(u) = tau w^T u + tau y^H phi`, `phi = T^{-1}(u + (tau/2) e_0) y`,
//! - `G(u) = -log det T(u)`.
//!
//! An [`Iterate`] caches the factorizations of `T(u)` and `T(u) + tau I`
//! together with `phi`; everything else is computed on demand through the
//! owning [`ObjectiveContext`].

use nalgebra::DMatrix;

use crate::cones::{quad, DualPoint, PrimalPoint};
use crate::fft::{embedding_len, FftPair};
use crate::toeplitz::{
    basis_apply, factorize, matvec, outer_adjoint_with, rank1_adjoint, ToeplitzFactorization,
    ToeplitzParam,
};
use crate::{Error, Result, C64};

/// Problem data `(y, tau, w)`.
#[derive(Debug, Clone)]
pub struct ObjectiveContext {
    y: Vec<C64>,
    tau: f64,
    w: Vec<f64>,
}

/// Cached state at one point `u` in `int C`.
#[derive(Debug, Clone)]
pub struct Iterate {
    pub u: ToeplitzParam,
    pub fact: ToeplitzFactorization,
    pub shifted: ToeplitzFactorization,
    pub phi: Vec<C64>,
    /// `g(u)`.
    pub g: f64,
    /// `G(u)`.
    pub barrier: f64,
}

/// Gradients of the two parts of `h_t`, kept apart so that `grad h_t` can be
/// re-formed for any `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub g: Vec<f64>,
    pub barrier: Vec<f64>,
}

impl Gradients {
    /// `grad g + grad G / t`.
    pub fn combine(&self, t: f64) -> Vec<f64> {
        self.g
            .iter()
            .zip(&self.barrier)
            .map(|(a, b)| a + b / t)
            .collect()
    }
}

impl Iterate {
    pub fn n(&self) -> usize {
        self.u.n()
    }

    /// `h_t(u)`.
    pub fn value(&self, t: f64) -> f64 {
        self.g + self.barrier / t
    }
}

/// `(1, (N-1)/(2N), ..., 1/(2N), (N-1)/(2N), ..., 1/(2N))`.
pub fn diag_scaling(n: usize) -> Vec<f64> {
    let mut s = vec![1.0; 2 * n - 1];
    for k in 1..n {
        let v = (n - k) as f64 / (2 * n) as f64;
        s[k] = v;
        s[n - 1 + k] = v;
    }
    s
}

impl ObjectiveContext {
    pub fn new(y: Vec<C64>, tau: f64, w: Vec<f64>) -> Result<Self> {
        let n = y.len();
        if n == 0 {
            return Err(Error::InvalidConfig("empty observation".into()));
        }
        if w.len() != 2 * n - 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * n - 1,
                found: w.len(),
            });
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "regularization weight must be positive and finite, got {tau}"
            )));
        }
        Ok(ObjectiveContext { y, tau, w })
    }

    /// Atomic norm soft thresholding: `w = 2 e_0`.
    pub fn ast(y: Vec<C64>, tau: f64) -> Result<Self> {
        let n = y.len().max(1);
        let mut w = vec![0.0; 2 * n - 1];
        w[0] = 2.0;
        Self::new(y, tau, w)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self) -> &[C64] {
        &self.y
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// Factorizes `T(u)` and `T(u) + tau I` and evaluates `g` and `G`.
    /// Fails with `NotPositiveDefinite` when `u` is not in `int C`.
    pub fn evaluate(&self, u: &ToeplitzParam, want_cholesky: bool) -> Result<Iterate> {
        let n = self.n();
        if u.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: u.n(),
            });
        }
        let fact = factorize(u, want_cholesky)?;
        let shifted = factorize(&u.shift_diagonal(self.tau / 2.0), false)?;
        let phi = shifted.solve_unchecked(&self.y);
        let g = self.tau * u.dot(&self.w) + self.tau * quad(&self.y, &phi);
        let barrier = -fact.logdet();
        Ok(Iterate {
            u: u.clone(),
            fact,
            shifted,
            phi,
            g,
            barrier,
        })
    }

    /// `(h_t, g, G)` at `u`.
    pub fn eval(&self, u: &ToeplitzParam, t: f64) -> Result<(f64, f64, f64)> {
        let it = self.evaluate(u, false)?;
        Ok((it.value(t), it.g, it.barrier))
    }

    /// `grad g = tau w - tau T*(phi phi^H)` and `grad G = -T*(T^{-1})`.
    pub fn gradients(&self, it: &Iterate) -> Gradients {
        let pp = rank1_adjoint(&it.phi);
        let g = self
            .w
            .iter()
            .zip(&pp)
            .map(|(w, p)| self.tau * (w - p))
            .collect();
        let barrier = it
            .fact
            .trace_of_inverse_diagonals()
            .into_iter()
            .map(|b| -b)
            .collect();
        Gradients { g, barrier }
    }

    /// `grad h_t(u)`.
    pub fn gradient(&self, u: &ToeplitzParam, t: f64) -> Result<Vec<f64>> {
        let it = self.evaluate(u, false)?;
        Ok(self.gradients(&it).combine(t))
    }

    /// `(grad^2 h_t)_{0,0} = 8 tau phi^H (T + tau I)^{-1} phi + 4 tr(T^{-2}) / t`.
    pub fn hessian_first_entry_at(&self, it: &Iterate, t: f64) -> f64 {
        let psi = it.shifted.solve_unchecked(&it.phi);
        8.0 * self.tau * quad(&it.phi, &psi) + 4.0 * it.fact.trace_inv_sq() / t
    }

    pub fn hessian_first_entry(&self, u: &ToeplitzParam, t: f64) -> Result<f64> {
        let it = self.evaluate(u, false)?;
        Ok(self.hessian_first_entry_at(&it, t))
    }

    /// Heuristic diagonal Hessian used to center the L-BFGS recursion.
    pub fn hessian_diag_approx_at(&self, it: &Iterate, t: f64) -> Vec<f64> {
        let h00 = self.hessian_first_entry_at(it, t);
        diag_scaling(self.n()).into_iter().map(|s| s * h00).collect()
    }

    pub fn hessian_diag_approx(&self, u: &ToeplitzParam, t: f64) -> Result<Vec<f64>> {
        let it = self.evaluate(u, false)?;
        Ok(self.hessian_diag_approx_at(&it, t))
    }

    /// `grad^2 g`, one column per basis direction:
    /// column `m` is `tau T*(d_m phi^H + phi d_m^H)`,
    /// `d_m = (T + tau I)^{-1} T(e_m) phi`.
    pub fn hessian_data_term(&self, it: &Iterate) -> DMatrix<f64> {
        let n = self.n();
        let dim = 2 * n - 1;
        let fft = FftPair::new(embedding_len(n));
        let phi_hat = fft.forward_padded(&it.phi);
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for m in 0..dim {
            let d = it.shifted.solve_unchecked(&basis_apply(n, m, &it.phi));
            let col = outer_adjoint_with(&fft, &phi_hat, &d);
            for (r, v) in col.into_iter().enumerate() {
                h[(r, m)] = self.tau * v;
            }
        }
        symmetrize(&mut h);
        h
    }

    /// `grad^2 h_t = grad^2 g + grad^2 G / t`; needs the Cholesky columns.
    pub fn hessian_full_at(&self, it: &Iterate, t: f64) -> Result<DMatrix<f64>> {
        let hb = barrier_hessian(&it.fact)?;
        let mut h = self.hessian_data_term(it);
        h.zip_apply(&hb, |a, b| *a += b / t);
        Ok(h)
    }

    pub fn hessian_full(&self, u: &ToeplitzParam, t: f64) -> Result<DMatrix<f64>> {
        let it = self.evaluate(u, true)?;
        self.hessian_full_at(&it, t)
    }

    /// Central-path primal point `x = T(u) phi`,
    /// `v = 1/(tau t) + x^H T^{-1} x = 1/(tau t) + Re(phi^H x)`.
    pub fn recover_primal(&self, it: &Iterate, t: f64) -> PrimalPoint {
        let x = matvec(&it.u, &it.phi).expect("dimensions checked on evaluate");
        let v = 1.0 / (self.tau * t) + quad(&it.phi, &x);
        PrimalPoint {
            v,
            x,
            u: it.u.clone(),
        }
    }

    /// `rho = tau`, `s = 2 (x - y)`, `z = tau w`.
    pub fn recover_dual(&self, x: &[C64]) -> DualPoint {
        DualPoint {
            rho: self.tau,
            s: x.iter().zip(&self.y).map(|(x, y)| 2.0 * (x - y)).collect(),
            z: self.w.iter().map(|w| self.tau * w).collect(),
        }
    }

    /// `f(mu) = ||x - y||^2 + tau (v + w^T u)`.
    pub fn primal_objective(&self, mu: &PrimalPoint) -> f64 {
        let r: f64 = mu.x.iter().zip(&self.y).map(|(x, y)| (x - y).norm_sqr()).sum();
        r + self.tau * (mu.v + mu.u.dot(&self.w))
    }

    /// `-||s||^2 / 4 - Re(y^H s)`.
    pub fn dual_objective(&self, lambda: &DualPoint) -> f64 {
        let ss: f64 = lambda.s.iter().map(|c| c.norm_sqr()).sum();
        -0.25 * ss - quad(&self.y, &lambda.s)
    }
}

fn symmetrize(h: &mut DMatrix<f64>) {
    let dim = h.nrows();
    for i in 0..dim {
        for j in i + 1..dim {
            let m = 0.5 * (h[(i, j)] + h[(j, i)]);
            h[(i, j)] = m;
            h[(j, i)] = m;
        }
    }
}

/// `grad^2 G` with entries `tr(T^{-1} T(e_n) T^{-1} T(e_m))`.
///
/// With `S_l` the length-`L` DFT of column `l` of `P D^{1/2}` and
/// `Y = sum_l S_l S_l^H`, the 2-D DFT `F` of `|Y|^2` (entrywise) gives
/// `A = 2 F[n][m] / L^2` and `B = 2 F[n][-m] / L^2`, from which the real and
/// imaginary blocks follow.
pub fn barrier_hessian(fact: &ToeplitzFactorization) -> Result<DMatrix<f64>> {
    let p = fact.cholesky_factor().ok_or(Error::MissingCholesky)?;
    let n = fact.n();
    let len = embedding_len(n);
    let fft = FftPair::new(len);

    let mut sr = DMatrix::<f64>::zeros(len, n);
    let mut si = DMatrix::<f64>::zeros(len, n);
    let mut buf = vec![C64::new(0.0, 0.0); len];
    for l in 0..n {
        let scale = fact.pivots()[l].sqrt().recip();
        buf.iter_mut().for_each(|b| *b = C64::new(0.0, 0.0));
        for r in 0..n {
            buf[r] = p[(r, l)] * scale;
        }
        fft.forward_in_place(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            sr[(j, l)] = b.re;
            si[(j, l)] = b.im;
        }
    }

    let srt = sr.transpose();
    let sit = si.transpose();
    let mut yr = &sr * &srt;
    yr.gemm(1.0, &si, &sit, 1.0);
    let mut yi = &si * &srt;
    yi.gemm(-1.0, &sr, &sit, 1.0);

    // Row transforms of |Y|^2, then column transforms for the needed columns.
    let mut z: Vec<Vec<C64>> = (0..len)
        .map(|i| {
            let mut row: Vec<C64> = (0..len)
                .map(|j| C64::new(yr[(i, j)].powi(2) + yi[(i, j)].powi(2), 0.0))
                .collect();
            fft.forward_in_place(&mut row);
            row
        })
        .collect();
    let mut col_hat = |c: usize| -> Vec<C64> {
        let mut col: Vec<C64> = z.iter().map(|row| row[c]).collect();
        fft.forward_in_place(&mut col);
        col.truncate(n);
        col
    };
    let scale = 2.0 / (len * len) as f64;
    let a_cols: Vec<Vec<C64>> = (0..n).map(&mut col_hat).collect();
    let b_cols: Vec<Vec<C64>> = (0..n).map(|m| col_hat((len - m) % len)).collect();
    z.clear();
    let a = |r: usize, c: usize| a_cols[c][r] * scale;
    let b = |r: usize, c: usize| b_cols[c][r] * scale;

    let dim = 2 * n - 1;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for r in 0..n {
        for c in 0..n {
            let (ar, br) = (a(r, c), b(r, c));
            h[(r, c)] = (ar + br).re;
            if c >= 1 {
                h[(r, n - 1 + c)] = (ar - br).im;
            }
            if r >= 1 {
                h[(n - 1 + r, c)] = (ar + br).im;
            }
            if r >= 1 && c >= 1 {
                h[(n - 1 + r, n - 1 + c)] = (br - ar).re;
            }
        }
    }
    symmetrize(&mut h);
    Ok(h)
}
