mod common;

use common::*;
use fastast::lse::{
    debias, dual_polynomial, estimate, hungarian, metrics, nmse, select_tau, wrap_distance,
    LineSpectralEstimate,
};
use fastast::solver::SolverConfig;
use fastast::solve_ast;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn assignment_cost(cost: &[Vec<f64>], a: &[usize]) -> f64 {
    a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

proptest! {
    #![proptest_config(prop_config(64))]

    #[test]
    fn hungarian_is_optimal(k in 1usize..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let cost: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| r.random_range(0.0..1.0)).collect()).collect();
        let a = hungarian(&cost);
        let mut seen = a.clone();
        seen.sort();
        prop_assert_eq!(seen, (0..k).collect::<Vec<_>>());
        let best = permutations(k).iter().map(|p| assignment_cost(&cost, p)).fold(f64::INFINITY, f64::min);
        prop_assert!((assignment_cost(&cost, &a) - best).abs() <= 1e-12);
    }

    #[test]
    fn metrics_ignore_estimate_order(k in 1usize..=5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = line_spectral(32, k, 20.0, seed);
        let perturbed: Vec<f64> = p.frequencies.iter().map(|w| w + r.random_range(-0.02..0.02)).collect();
        let est = debias(&p.y, &perturbed);
        let mut shuffled = est.clone();
        let mut idx: Vec<usize> = (0..est.k_hat()).collect();
        idx.shuffle(&mut r);
        shuffled.frequencies = idx.iter().map(|&i| est.frequencies[i]).collect();
        shuffled.coefficients = idx.iter().map(|&i| est.coefficients[i]).collect();
        let a = metrics(&est, &p);
        let b = metrics(&shuffled, &p);
        prop_assert_eq!(a.success, b.success);
        prop_assert_eq!(a.nmse, b.nmse);
        match (a.freq_mse, b.freq_mse) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-15),
            (x, y) => prop_assert_eq!(x, y),
        }
    }

    #[test]
    fn wrap_distance_is_a_metric(a in -20.0f64..20.0, b in -20.0f64..20.0, c in -20.0f64..20.0) {
        prop_assert_eq!(wrap_distance(a, b), wrap_distance(b, a));
        prop_assert!(wrap_distance(a, b) <= std::f64::consts::PI + 1e-12);
        prop_assert!(wrap_distance(a, c) <= wrap_distance(a, b) + wrap_distance(b, c) + 1e-12);
    }
}

#[test]
fn single_sinusoid_is_recovered() {
    for seed in 0..5 {
        let p = line_spectral(64, 1, 40.0, 500 + seed);
        let tau = select_tau(64, p.noise_var.sqrt());
        let res = solve_ast(&p.y, tau, &SolverConfig::newton()).unwrap();
        let est = estimate(&res.primal.x, &p.y, tau);
        assert_eq!(est.k_hat(), 1, "seed {seed}: {:?}", est.frequencies);
        let err = wrap_distance(est.frequencies[0], p.frequencies[0]);
        assert!(err <= 1e-3, "seed {seed}: frequency error {err}");
        assert!(metrics(&est, &p).success);
    }
}

#[test]
fn certificate_dual_polynomial_is_bounded() {
    for seed in 0..4 {
        let p = line_spectral(32, 3, 20.0, 600 + seed);
        let tau = select_tau(32, p.noise_var.sqrt());
        let res = solve_ast(&p.y, tau, &SolverConfig::newton()).unwrap();
        // Q = a^H (y - x) / tau with s = 2 (x - y).
        let residual: Vec<_> = res.certificate.s.iter().map(|s| -0.5 * s).collect();
        let q = dual_polynomial(&residual, tau, 32 * 32);
        let max = q.iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(max <= 1.0 + 1e-8, "seed {seed}: max |Q| = {max}");
        let final_res: Vec<_> = p.y.iter().zip(&res.primal.x).map(|(y, x)| y - x).collect();
        let max = dual_polynomial(&final_res, tau, 32 * 32).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(max <= 1.0 + 1e-3, "seed {seed}: final max |Q| = {max}");
    }
}

#[test]
fn debiasing_does_not_hurt_on_average() {
    let (mut raw, mut debiased) = (0.0, 0.0);
    for seed in 0..10 {
        let p = line_spectral(32, 3, 20.0, 700 + seed);
        let tau = select_tau(32, p.noise_var.sqrt());
        let res = solve_ast(&p.y, tau, &SolverConfig::newton()).unwrap();
        raw += nmse(&res.primal.x, &p.signal);
        debiased += nmse(&estimate(&res.primal.x, &p.y, tau).signal, &p.signal);
    }
    println!("mean NMSE: raw {:.3e}, debiased {:.3e}", raw / 10.0, debiased / 10.0);
    assert!(debiased <= raw);
}

#[test]
fn empty_estimate_has_unit_nmse() {
    let p = line_spectral(16, 2, 20.0, 1);
    let est = LineSpectralEstimate {
        frequencies: Vec::new(),
        coefficients: Vec::new(),
        signal: vec![fastast::C64::new(0.0, 0.0); 16],
    };
    let m = metrics(&est, &p);
    assert!(!m.success);
    assert!((m.nmse - 1.0).abs() < 1e-15);
}
