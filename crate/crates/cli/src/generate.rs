//! Synthetic line spectral estimation instances.

use std::f64::consts::{PI, TAU};

use fastast::lse::{wrap_distance, LineSpectralProblem};
use fastast::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::CliError;

/// Frequency draws allowed before giving up on the separation constraint.
pub const MAX_ATTEMPTS: usize = 10_000;

/// Draws `K` frequencies on `[0, 2 pi)` with wrap-around separation at least
/// `4 pi / N`, standard complex Gaussian coefficients, and complex Gaussian
/// noise with `||x||^2 / (N sigma^2)` equal to the target SNR. A signal-free
/// instance (`K = 0`) gets unit noise variance.
pub fn generate_problem(n: usize, k: usize, snr_db: f64, seed: u64) -> Result<LineSpectralProblem, CliError> {
    if n < 2 {
        return Err(CliError::Config(format!("N must be at least 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_sep = 4.0 * PI / n as f64;
    let mut frequencies: Vec<f64> = Vec::with_capacity(k);
    let mut attempts = 0;
    while frequencies.len() < k {
        if attempts == MAX_ATTEMPTS {
            return Err(CliError::Generate { n, k });
        }
        attempts += 1;
        let w = rng.random_range(0.0..TAU);
        if frequencies.iter().all(|&f| wrap_distance(f, w) >= min_sep) {
            frequencies.push(w);
        }
    }

    let half = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid deviation");
    let coefficients: Vec<C64> = (0..k)
        .map(|_| C64::new(half.sample(&mut rng), half.sample(&mut rng)))
        .collect();

    let signal = fastast::lse::synthesize(n, &frequencies, &coefficients);
    let energy: f64 = signal.iter().map(|c| c.norm_sqr()).sum();
    let noise_var = if energy > 0.0 {
        energy / (n as f64 * 10f64.powf(snr_db / 10.0))
    } else {
        1.0
    };
    let std = Normal::new(0.0, (noise_var / 2.0).sqrt()).expect("valid deviation");
    let noise: Vec<C64> = (0..n)
        .map(|_| C64::new(std.sample(&mut rng), std.sample(&mut rng)))
        .collect();
    Ok(LineSpectralProblem::from_parts(frequencies, coefficients, &noise, noise_var, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = generate_problem(32, 3, 20.0, 7).unwrap();
        let b = generate_problem(32, 3, 20.0, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_problem(32, 3, 20.0, 8).unwrap();
        assert_ne!(a.y, c.y);
    }

    #[test]
    fn snr_sets_noise_variance() {
        let p = generate_problem(64, 4, 10.0, 1).unwrap();
        let energy: f64 = p.signal.iter().map(|c| c.norm_sqr()).sum();
        let snr = energy / (64.0 * p.noise_var);
        assert!((snr - 10.0).abs() < 1e-9);
    }

    #[test]
    fn no_sinusoids_is_pure_noise() {
        let p = generate_problem(16, 0, 20.0, 3).unwrap();
        assert!(p.signal.iter().all(|c| c.norm() == 0.0));
        assert_eq!(p.noise_var, 1.0);
        assert!(p.y.iter().any(|c| c.norm() > 0.0));
    }

    #[test]
    fn impossible_separation_is_reported() {
        assert!(matches!(generate_problem(8, 8, 20.0, 0), Err(CliError::Generate { .. })));
    }
}
