//! Membership oracles for the cones of the conic AST formulation.
//!
//! - `C`: parameters `u` with `T(u) >= 0`.
//! - `C*`: finite autocorrelation sequences, i.e. `z` whose trigonometric
//!   polynomial `Z(w) = (z_C)_0 + 2 sum_k Re((z_C)_k e^{-iwk})` is nonnegative.
//! - `K`: `mu = (v, x, u)` with `[[T(u), x], [x^H, v]] >= 0`.
//! - `K*`: `lambda = (rho, s, z)` with either `rho > 0` and
//!   `z - T*(s s^H) / (4 rho)` in `C*`, or `rho = 0`, `s = 0`, `z` in `C*`.
//!
//! Membership in `C*` (and hence `K*`) is decided by sampling `Z` on an FFT
//! grid and polishing the candidate minima with Newton steps, so it is
//! approximate. A point accepted within tolerance can be infeasible by
//! `O(tol)`, which inflates a dual lower bound by the same order at most.

use nalgebra::DMatrix;

use crate::fft::{embedding_len, next_pow2, FftPair};
use crate::toeplitz::{complexify, dense, factorize, rank1_adjoint, ToeplitzParam};
use crate::{Error, Result, C64};

/// Relative tolerance of the sampled nonnegativity test.
pub const DUAL_TOL: f64 = 1e-9;

/// Default sampling grid for an `N`-term polynomial: `16 * next_pow2(N)`.
pub fn default_grid(n: usize) -> usize {
    16 * next_pow2(n)
}

/// Primal variable `mu = (v, x, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPoint {
    pub v: f64,
    pub x: Vec<C64>,
    pub u: ToeplitzParam,
}

/// Dual variable `lambda = (rho, s, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub rho: f64,
    pub s: Vec<C64>,
    pub z: Vec<f64>,
}

impl PrimalPoint {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Dense `(N+1) x (N+1)` block matrix `[[T(u), x], [x^H, v]]`.
    pub fn block_matrix(&self) -> DMatrix<C64> {
        let n = self.n();
        let t = self.u.build_dense();
        DMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => t[(i, j)],
            (true, false) => self.x[i],
            (false, true) => self.x[j].conj(),
            (false, false) => C64::new(self.v, 0.0),
        })
    }

    /// Squared Euclidean distance to another point, treating `x` as complex.
    pub fn distance_sq(&self, other: &PrimalPoint) -> f64 {
        let dv = (self.v - other.v).powi(2);
        let dx: f64 = self.x.iter().zip(&other.x).map(|(a, b)| (a - b).norm_sqr()).sum();
        let du: f64 = self
            .u
            .as_slice()
            .iter()
            .zip(other.u.as_slice())
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        dv + dx + du
    }

    pub fn norm_sq(&self) -> f64 {
        self.v * self.v
            + self.x.iter().map(|c| c.norm_sqr()).sum::<f64>()
            + self.u.as_slice().iter().map(|a| a * a).sum::<f64>()
    }
}

impl DualPoint {
    /// `<lambda, mu> = rho v + Re(s^H x) + z^T u`.
    pub fn inner(&self, mu: &PrimalPoint) -> f64 {
        let sx: f64 = self.s.iter().zip(&mu.x).map(|(s, x)| (s.conj() * x).re).sum();
        self.rho * mu.v + sx + mu.u.dot(&self.z)
    }
}

/// Samples `Z(w_j)`, `w_j = 2 pi j / grid`, for `z` of length `2N - 1`.
/// Grids shorter than `2N - 1` are rounded up to the embedding length.
pub fn spectrum(z: &[f64], grid: usize) -> Vec<f64> {
    let zc = complexify(z);
    let grid = grid.max(embedding_len(zc.len()));
    let fft = FftPair::new(grid);
    let f = fft.forward_padded(&zc);
    // (z_C)_0 is real and counted once; 2 Re(F) counts it twice.
    f.iter().map(|c| 2.0 * c.re - zc[0].re).collect()
}

/// `min_j Z(w_j)` over the sampling grid.
pub fn spectrum_min(z: &[f64], grid: usize) -> f64 {
    spectrum(z, grid).into_iter().fold(f64::INFINITY, f64::min)
}

/// Sampled test for `z` in `C*`: `min Z >= -tol * max(1, Z(0))`, where the
/// minimum is taken over the grid and then refined around every grid
/// minimum that the curvature bound allows to dip below the threshold.
pub fn in_dual_autocorr_with_grid(z: &[f64], grid: usize, tol: f64) -> bool {
    let samples = spectrum(z, grid);
    let scale = samples[0].max(1.0);
    refined_min(z, &samples) >= -tol * scale
}

/// Minimum of `Z` from grid samples, polished by Newton steps on `Z`
/// near each candidate grid minimum.
pub fn spectrum_min_refined(z: &[f64], grid: usize) -> f64 {
    refined_min(z, &spectrum(z, grid))
}

fn refined_min(z: &[f64], samples: &[f64]) -> f64 {
    let zc = complexify(z);
    let len = samples.len();
    let grid_min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    if zc.len() < 2 || !grid_min.is_finite() {
        return grid_min;
    }
    let h = std::f64::consts::TAU / len as f64;
    // |Z''| <= 2 sum k^2 |z_k| bounds the dip between two samples by M h^2 / 8.
    let curvature: f64 = zc.iter().enumerate().skip(1).map(|(k, c)| 2.0 * (k * k) as f64 * c.norm()).sum();
    let dip = curvature * h * h / 8.0;
    let mut best = grid_min;
    for j in 0..len {
        let (prev, next) = (samples[(j + len - 1) % len], samples[(j + 1) % len]);
        if samples[j] > prev || samples[j] > next || samples[j] - dip >= best.min(0.0) {
            continue;
        }
        let mut w = j as f64 * h;
        for _ in 0..8 {
            let (v, d1, d2) = trig_derivatives(&zc, w);
            best = best.min(v);
            let step = if d2 > 0.0 { -d1 / d2 } else { -d1.signum() * h };
            if !step.is_finite() || step.abs() < 1e-15 {
                break;
            }
            w += step.clamp(-h, h);
        }
        best = best.min(trig_derivatives(&zc, w).0);
    }
    best
}

/// `(Z, Z', Z'')` at `w`.
fn trig_derivatives(zc: &[C64], w: f64) -> (f64, f64, f64) {
    let mut v = zc[0].re;
    let (mut d1, mut d2) = (0.0, 0.0);
    for (k, c) in zc.iter().enumerate().skip(1) {
        let e = c * C64::from_polar(1.0, -w * k as f64);
        let k = k as f64;
        v += 2.0 * e.re;
        d1 += 2.0 * k * e.im;
        d2 -= 2.0 * k * k * e.re;
    }
    (v, d1, d2)
}

/// [`in_dual_autocorr_with_grid`] on the default grid.
pub fn in_dual_autocorr(z: &[f64], tol: f64) -> bool {
    let n = (z.len() + 1) / 2;
    in_dual_autocorr_with_grid(z, default_grid(n), tol)
}

/// The finite autocorrelation sequence generated by `q`:
/// `(z_C)_k = sum_n conj(q_n) q_{n+k}`, returned in real layout.
pub fn autocorrelation(q: &[C64]) -> Vec<f64> {
    let n = q.len();
    let zc: Vec<C64> = (0..n)
        .map(|k| (0..n - k).map(|m| q[m].conj() * q[m + k]).sum())
        .collect();
    ToeplitzParam::from_complex(&zc).into_vec()
}

/// Membership in `C` (`strict`: interior, via Levinson pivots) or its
/// closure (dense eigenvalue check, for tests and small `N`).
pub fn in_primal_cone(u: &ToeplitzParam, strict: bool) -> bool {
    if strict {
        factorize(u, false).is_ok()
    } else {
        let t = u.build_dense();
        let scale = t[(0, 0)].re.abs().max(1.0);
        dense::is_psd(&t, 1e-12 * scale * u.n() as f64)
    }
}

/// `c(lambda) = z - T*(s s^H) / (4 rho)` for `rho > 0`.
pub fn dual_slack(lambda: &DualPoint) -> Option<Vec<f64>> {
    if !(lambda.rho > 0.0) {
        return None;
    }
    let ss = rank1_adjoint(&lambda.s);
    let k = 1.0 / (4.0 * lambda.rho);
    Some(lambda.z.iter().zip(&ss).map(|(z, a)| z - k * a).collect())
}

/// Sampled membership test for `K*` on the default grid.
pub fn in_dual_cone(lambda: &DualPoint, tol: f64) -> bool {
    let n = lambda.s.len();
    in_dual_cone_with_grid(lambda, default_grid(n), tol)
}

pub fn in_dual_cone_with_grid(lambda: &DualPoint, grid: usize, tol: f64) -> bool {
    if lambda.rho < 0.0 || lambda.rho.is_nan() {
        false
    } else if lambda.rho == 0.0 {
        lambda.s.iter().all(|c| *c == C64::new(0.0, 0.0))
            && in_dual_autocorr_with_grid(&lambda.z, grid, tol)
    } else {
        let c = dual_slack(lambda).expect("rho > 0");
        in_dual_autocorr_with_grid(&c, grid, tol)
    }
}

/// Membership in `K` (`strict`: interior via `T(u) > 0` and a positive
/// Schur complement `v - x^H T^{-1} x`; otherwise a dense PSD check).
pub fn in_primal_cone_k(mu: &PrimalPoint, strict: bool) -> bool {
    if strict {
        match factorize(&mu.u, false) {
            Ok(f) => match f.solve(&mu.x) {
                Ok(xi) => mu.v - quad(&mu.x, &xi) > 0.0,
                Err(_) => false,
            },
            Err(_) => false,
        }
    } else {
        let m = mu.block_matrix();
        let scale = m.diagonal().iter().map(|d| d.re.abs()).fold(1.0, f64::max);
        dense::is_psd(&m, 1e-12 * scale * m.nrows() as f64)
    }
}

/// `-grad F(mu)` for the log-determinant barrier
/// `F(mu) = -log det [[T(u), x], [x^H, v]]`; lies in `int K*` and pairs
/// with `mu` to `N + 1`.
pub fn neg_barrier_gradient(mu: &PrimalPoint) -> Result<DualPoint> {
    let n = mu.n();
    if mu.u.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mu.u.n(),
        });
    }
    let f = factorize(&mu.u, false)?;
    let xi = f.solve(&mu.x)?;
    let schur = mu.v - quad(&mu.x, &xi);
    if !(schur > 0.0) {
        return Err(Error::NotSolvable("point is not in the interior of K"));
    }
    let inv_diag = f.trace_of_inverse_diagonals();
    let xi_adj = rank1_adjoint(&xi);
    Ok(DualPoint {
        rho: 1.0 / schur,
        s: xi.iter().map(|c| -2.0 * c / schur).collect(),
        z: inv_diag
            .iter()
            .zip(&xi_adj)
            .map(|(a, b)| a + b / schur)
            .collect(),
    })
}

/// `Re(a^H b)`.
pub(crate) fn quad(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum()
}
