//! Line spectral estimation on top of the AST solver.
//!
//! Observations follow `y = sum_k c_k a(w_k) + noise` with steering vectors
//! `a(w)_n = exp(i n w)`. After solving, frequencies are read off the dual
//! polynomial `Q(w) = a(w)^H (y - x*) / tau`, whose modulus touches 1 at the
//! support of the solution. Coefficients are then re-fitted by least squares.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

use crate::fft::{next_pow2, FftPair};
use crate::C64;

/// Peak acceptance: `|Q(w)| >= 1 - PEAK_EPS`.
pub const PEAK_EPS: f64 = 1e-3;
/// Newton refinement steps per peak.
pub const REFINE_STEPS: usize = 5;
/// Frequencies closer than this are merged before least squares.
pub const DUPLICATE_TOL: f64 = 1e-6;

/// A synthetic line spectral estimation instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSpectralProblem {
    pub n: usize,
    pub frequencies: Vec<f64>,
    pub coefficients: Vec<C64>,
    pub noise_var: f64,
    /// Noise-free signal `sum_k c_k a(w_k)`.
    pub signal: Vec<C64>,
    pub y: Vec<C64>,
    pub seed: u64,
}

impl LineSpectralProblem {
    /// Builds `signal` from the frequencies and coefficients and adds `noise`.
    pub fn from_parts(
        frequencies: Vec<f64>,
        coefficients: Vec<C64>,
        noise: &[C64],
        noise_var: f64,
        seed: u64,
    ) -> Self {
        let n = noise.len();
        let signal = synthesize(n, &frequencies, &coefficients);
        let y = signal.iter().zip(noise).map(|(s, z)| s + z).collect();
        LineSpectralProblem {
            n,
            frequencies,
            coefficients,
            noise_var,
            signal,
            y,
            seed,
        }
    }

    pub fn k(&self) -> usize {
        self.frequencies.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSpectralEstimate {
    /// Ascending in `[0, 2 pi)`.
    pub frequencies: Vec<f64>,
    pub coefficients: Vec<C64>,
    /// Debiased signal `sum_k c_k a(w_k)`.
    pub signal: Vec<C64>,
}

impl LineSpectralEstimate {
    pub fn k_hat(&self) -> usize {
        self.frequencies.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub nmse: f64,
    pub success: bool,
    /// Mean squared wrap-around error of matched frequencies; only on success.
    pub freq_mse: Option<f64>,
}

/// `a(w)_n = exp(i n w)`.
pub fn steering(n: usize, omega: f64) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(1.0, k as f64 * omega)).collect()
}

/// `sum_k c_k a(w_k)`.
pub fn synthesize(n: usize, frequencies: &[f64], coefficients: &[C64]) -> Vec<C64> {
    let mut x = vec![C64::new(0.0, 0.0); n];
    for (w, c) in frequencies.iter().zip(coefficients) {
        for (xi, a) in x.iter_mut().zip(steering(n, *w)) {
            *xi += c * a;
        }
    }
    x
}

/// Regularization weight for noise level `sigma`:
/// `sigma (1 + 1/ln N) sqrt(N ln N + N ln(4 pi ln N))`.
pub fn select_tau(n: usize, sigma: f64) -> f64 {
    let nf = n as f64;
    let ln = nf.ln();
    sigma * ((ln + 1.0) / ln) * (nf * ln + nf * (4.0 * PI * ln).ln()).sqrt()
}

/// Wrap-around distance on the circle, in `[0, pi]`.
pub fn wrap_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % TAU;
    d.min(TAU - d)
}

fn wrap_angle(w: f64) -> f64 {
    let r = w.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `Q(w_j)` on the uniform grid `w_j = 2 pi j / grid` for `Q(w) = a(w)^H r / tau`.
pub fn dual_polynomial(residual: &[C64], tau: f64, grid: usize) -> Vec<C64> {
    let fft = FftPair::new(grid);
    let mut q = fft.forward_padded(residual);
    q.iter_mut().for_each(|c| *c /= tau);
    q
}

/// `(Q, Q', Q'')` at one frequency.
fn dual_poly_derivs(residual: &[C64], tau: f64, w: f64) -> (C64, C64, C64) {
    let mut q = C64::new(0.0, 0.0);
    let mut dq = C64::new(0.0, 0.0);
    let mut ddq = C64::new(0.0, 0.0);
    for (k, r) in residual.iter().enumerate() {
        let kf = k as f64;
        let term = r * C64::from_polar(1.0, -kf * w);
        q += term;
        dq += term * C64::new(0.0, -kf);
        ddq += term * (-kf * kf);
    }
    (q / tau, dq / tau, ddq / tau)
}

/// Newton steps on `|Q|^2` from `w`, each limited to `max_step`.
fn refine_peak(residual: &[C64], tau: f64, mut w: f64, max_step: f64) -> (f64, f64) {
    for _ in 0..REFINE_STEPS {
        let (q, dq, ddq) = dual_poly_derivs(residual, tau, w);
        let f1 = 2.0 * (q.conj() * dq).re;
        let f2 = 2.0 * (dq.norm_sqr() + (q.conj() * ddq).re);
        if !(f2 < 0.0) {
            break;
        }
        let step = (-f1 / f2).clamp(-max_step, max_step);
        w += step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    let w = wrap_angle(w);
    (w, dual_poly_derivs(residual, tau, w).0.norm())
}

/// Frequencies where the dual polynomial built from `y - x_star` reaches
/// modulus 1, ascending.
pub fn extract_frequencies(x_star: &[C64], y: &[C64], tau: f64) -> Vec<f64> {
    let n = y.len();
    let residual: Vec<C64> = y.iter().zip(x_star).map(|(y, x)| y - x).collect();
    let grid = 32 * next_pow2(n);
    let q: Vec<f64> = dual_polynomial(&residual, tau, grid)
        .iter()
        .map(|c| c.norm())
        .collect();
    let spacing = TAU / grid as f64;
    // Grid samples can sit below a peak that reaches 1, so threshold after refining.
    let pre = 1.0 - 0.25;
    let mut found: Vec<f64> = Vec::new();
    for j in 0..grid {
        let prev = q[(j + grid - 1) % grid];
        let next = q[(j + 1) % grid];
        if q[j] >= pre && q[j] >= prev && q[j] > next {
            let (w, mag) = refine_peak(&residual, tau, j as f64 * spacing, spacing);
            if mag >= 1.0 - PEAK_EPS {
                found.push(w);
            }
        }
    }
    found.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(found.len());
    for w in found {
        if out.last().map_or(true, |&p| wrap_distance(p, w) > spacing / 2.0) {
            out.push(w);
        }
    }
    if out.len() > 1 && wrap_distance(out[0], *out.last().unwrap()) <= spacing / 2.0 {
        out.pop();
    }
    out
}

/// Sorts and merges frequencies closer than [`DUPLICATE_TOL`].
fn collapse_duplicates(frequencies: &[f64]) -> Vec<f64> {
    let mut f: Vec<f64> = frequencies.iter().map(|w| wrap_angle(*w)).collect();
    f.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(f.len());
    for w in f {
        if out.last().map_or(true, |&p| wrap_distance(p, w) >= DUPLICATE_TOL) {
            out.push(w);
        }
    }
    if out.len() > 1 && wrap_distance(out[0], *out.last().unwrap()) < DUPLICATE_TOL {
        out.pop();
    }
    out
}

/// Least-squares coefficients of `y` on the steering vectors of
/// `frequencies` (near-duplicates merged), and the fitted signal.
pub fn debias(y: &[C64], frequencies: &[f64]) -> LineSpectralEstimate {
    let n = y.len();
    let freqs = collapse_duplicates(frequencies);
    if freqs.is_empty() {
        return LineSpectralEstimate {
            frequencies: freqs,
            coefficients: Vec::new(),
            signal: vec![C64::new(0.0, 0.0); n],
        };
    }
    let a = DMatrix::from_fn(n, freqs.len(), |r, c| C64::from_polar(1.0, r as f64 * freqs[c]));
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let coeffs = svd
        .solve(&b, 1e-12 * svd.singular_values.max())
        .expect("both singular vector sets were computed");
    let signal = &a * &coeffs;
    LineSpectralEstimate {
        frequencies: freqs,
        coefficients: coeffs.iter().copied().collect(),
        signal: signal.iter().copied().collect(),
    }
}

/// Frequency extraction followed by debiasing.
pub fn estimate(x_star: &[C64], y: &[C64], tau: f64) -> LineSpectralEstimate {
    debias(y, &extract_frequencies(x_star, y, tau))
}

/// Least squares with the true frequencies.
pub fn oracle_estimate(problem: &LineSpectralProblem) -> LineSpectralEstimate {
    debias(&problem.y, &problem.frequencies)
}

/// `||x_hat - x||^2 / ||x||^2` (NaN when `x = 0`).
pub fn nmse(x_hat: &[C64], x: &[C64]) -> f64 {
    let err: f64 = x_hat.iter().zip(x).map(|(a, b)| (a - b).norm_sqr()).sum();
    let energy: f64 = x.iter().map(|c| c.norm_sqr()).sum();
    if energy == 0.0 {
        f64::NAN
    } else {
        err / energy
    }
}

/// Optimal assignment for a square cost matrix: `result[row] = column`,
/// minimizing the total cost (Hungarian method with potentials, `O(K^3)`).
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let k = cost.len();
    if k == 0 {
        return Vec::new();
    }
    // 1-based arrays; column 0 is a sentinel.
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; k];
    for j in 1..=k {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

/// NMSE of the debiased signal, model-order/frequency success and, on
/// success, the frequency MSE of the optimal matching.
pub fn metrics(estimate: &LineSpectralEstimate, problem: &LineSpectralProblem) -> Metrics {
    let nmse = nmse(&estimate.signal, &problem.signal);
    let k = problem.k();
    if estimate.k_hat() != k {
        return Metrics {
            nmse,
            success: false,
            freq_mse: None,
        };
    }
    if k == 0 {
        return Metrics {
            nmse,
            success: true,
            freq_mse: Some(0.0),
        };
    }
    let cost: Vec<Vec<f64>> = estimate
        .frequencies
        .iter()
        .map(|a| {
            problem
                .frequencies
                .iter()
                .map(|b| wrap_distance(*a, *b).powi(2))
                .collect()
        })
        .collect();
    let assignment = hungarian(&cost);
    let limit = PI / problem.n as f64;
    let mut total = 0.0;
    let mut success = true;
    for (i, &j) in assignment.iter().enumerate() {
        let d = wrap_distance(estimate.frequencies[i], problem.frequencies[j]);
        success &= d <= limit;
        total += d * d;
    }
    Metrics {
        nmse,
        success,
        freq_mse: success.then(|| total / k as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + go(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        go(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn tau_formula() {
        let n = 64.0f64;
        let ln = n.ln();
        let want = ((ln + 1.0) / ln) * (n * ln + n * (4.0 * PI * ln).ln()).sqrt();
        assert!((select_tau(64, 1.0) - want).abs() < 1e-12 * want);
        assert!((select_tau(64, 2.0) - 2.0 * select_tau(64, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn wrap_distance_properties() {
        assert!((wrap_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
        assert_eq!(wrap_distance(1.0, 1.0), 0.0);
        assert!((wrap_distance(0.0, PI) - PI).abs() < 1e-15);
        assert_eq!(wrap_distance(0.3, 2.0), wrap_distance(2.0, 0.3));
    }

    #[test]
    fn zero_residual_has_no_peaks() {
        let y = vec![c(1.0, 0.0), c(0.5, 0.5), c(0.0, 1.0)];
        assert!(extract_frequencies(&y, &y, 1.0).is_empty());
    }

    #[test]
    fn single_tone_peak_is_located() {
        // Residual tau * a(w0) / N has |Q| = 1 exactly at w0.
        let n = 64;
        let w0 = 1.234_567;
        let tau = 3.0;
        let a = steering(n, w0);
        let y: Vec<C64> = a.iter().map(|v| v * (tau / n as f64)).collect();
        let x = vec![c(0.0, 0.0); n];
        let f = extract_frequencies(&x, &y, tau);
        assert_eq!(f.len(), 1);
        assert!(wrap_distance(f[0], w0) < 1e-9);
    }

    #[test]
    fn debias_exact_recovers_coefficients() {
        let n = 32;
        let freqs = vec![0.5, 2.0, 4.5];
        let coeffs = vec![c(1.0, -0.5), c(0.3, 0.8), c(-1.2, 0.1)];
        let y = synthesize(n, &freqs, &coeffs);
        let est = debias(&y, &freqs);
        for (a, b) in est.coefficients.iter().zip(&coeffs) {
            assert!((a - b).norm() < 1e-10);
        }
        let empty = debias(&y, &[]);
        assert!(empty.signal.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn debias_merges_duplicates() {
        let n = 16;
        let y = synthesize(n, &[1.0], &[c(2.0, 0.0)]);
        let est = debias(&y, &[1.0, 1.0 + 1e-9]);
        assert_eq!(est.k_hat(), 1);
        assert!((est.coefficients[0] - c(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn hungarian_matches_brute_force() {
        let cost = vec![
            vec![4.0, 1.0, 3.0, 2.0],
            vec![2.0, 0.0, 5.0, 3.0],
            vec![3.0, 2.0, 2.0, 1.0],
            vec![1.0, 4.0, 2.0, 6.0],
        ];
        let a = hungarian(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, brute_force(&cost));
    }

    #[test]
    fn perfect_estimate_metrics() {
        let n = 32;
        let freqs = vec![0.5, 3.0];
        let coeffs = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let noise = vec![c(0.0, 0.0); n];
        let p = LineSpectralProblem::from_parts(freqs.clone(), coeffs, &noise, 0.0, 0);
        let est = debias(&p.y, &[3.0, 0.5]);
        let m = metrics(&est, &p);
        assert!(m.nmse < 1e-20);
        assert!(m.success);
        assert!(m.freq_mse.unwrap() < 1e-24);

        let est = debias(&p.y, &[0.5]);
        let m = metrics(&est, &p);
        assert!(!m.success);
        assert_eq!(m.freq_mse, None);
    }
}
