#![allow(dead_code)]

use std::f64::consts::TAU;

use fastast::lse::steering;
use fastast::toeplitz::ToeplitzParam;
use fastast::{PrimalPoint, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cn(rng: &mut ChaCha8Rng) -> C64 {
    let d = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    C64::new(d.sample(rng), d.sample(rng))
}

pub fn cvec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| cn(rng)).collect()
}

/// `u` with `T(u) = sum_k w_k a(w_k) a(w_k)^H`.
pub fn vandermonde_u(freqs: &[f64], weights: &[f64], n: usize) -> ToeplitzParam {
    let uc: Vec<C64> = (0..n)
        .map(|k| {
            let s: C64 = freqs
                .iter()
                .zip(weights)
                .map(|(&f, &w)| w * C64::from_polar(1.0, -(k as f64) * f))
                .sum();
            if k == 0 {
                s * 0.5
            } else {
                s
            }
        })
        .collect();
    ToeplitzParam::from_complex(&uc)
}

/// Random positive definite parameter: a few atoms plus diagonal loading.
pub fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> ToeplitzParam {
    let k = rng.random_range(1..=n.div_ceil(2));
    let freqs: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..TAU)).collect();
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.5)).collect();
    let load = rng.random_range(0.05..0.5);
    vandermonde_u(&freqs, &weights, n).shift_diagonal(load)
}

/// Random strictly interior point of `K`.
pub fn random_interior(rng: &mut ChaCha8Rng, n: usize) -> PrimalPoint {
    let u = random_pd(rng, n);
    let x = cvec(rng, n);
    let t = u.build_dense();
    let tx = fastast::toeplitz::dense::inverse(&t).unwrap() * DMatrix::from_column_slice(n, 1, &x);
    let schur: f64 = x.iter().zip(tx.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    let v = schur + rng.random_range(0.05..2.0);
    PrimalPoint { v, x, u }
}

/// Random point of `K` built from atoms, usually on the boundary.
pub fn random_atomic(rng: &mut ChaCha8Rng, n: usize) -> PrimalPoint {
    let k = rng.random_range(1..=n);
    let mut v = 0.0;
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut freqs = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for _ in 0..k {
        let f = rng.random_range(0.0..TAU);
        let w = rng.random_range(0.1..2.0);
        let g = cn(rng);
        let a = steering(n, f);
        for (xi, ai) in x.iter_mut().zip(&a) {
            *xi += w * ai * g.conj();
        }
        v += w * g.norm_sqr();
        freqs.push(f);
        weights.push(w);
    }
    PrimalPoint {
        v,
        x,
        u: vandermonde_u(&freqs, &weights, n),
    }
}

pub fn rel_err_c(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

pub fn rel_err_mat(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm() / b.norm()
}

pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}

/// Line spectral instance with frequencies at least `4 pi / N` apart and
/// complex Gaussian noise at `snr_db`.
pub fn line_spectral(n: usize, k: usize, snr_db: f64, seed: u64) -> fastast::lse::LineSpectralProblem {
    let mut r = rng(seed);
    let min_sep = 4.0 * std::f64::consts::PI / n as f64;
    let mut freqs: Vec<f64> = Vec::with_capacity(k);
    while freqs.len() < k {
        let f = r.random_range(0.0..TAU);
        if freqs.iter().all(|&g| fastast::lse::wrap_distance(f, g) >= min_sep) {
            freqs.push(f);
        }
    }
    let coeffs = cvec(&mut r, k);
    let signal = fastast::lse::synthesize(n, &freqs, &coeffs);
    let energy: f64 = signal.iter().map(|c| c.norm_sqr()).sum();
    let noise_var = if k == 0 { 1.0 } else { energy / (n as f64 * 10f64.powf(snr_db / 10.0)) };
    let noise: Vec<C64> = cvec(&mut r, n).into_iter().map(|c| c * noise_var.sqrt()).collect();
    fastast::lse::LineSpectralProblem::from_parts(freqs, coeffs, &noise, noise_var, seed)
}
