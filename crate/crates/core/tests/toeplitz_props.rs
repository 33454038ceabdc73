mod common;

use common::*;
use fastast::toeplitz::{adjoint, dense, factorize, matvec, outer_adjoint, rank1_adjoint, ToeplitzParam};
use fastast::C64;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(prop_config(64))]

    #[test]
    fn solve_matches_dense(n in 1usize..=64, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_pd(&mut r, n);
        let b = cvec(&mut r, n);
        let x = factorize(&u, false).unwrap().solve(&b).unwrap();
        let t = u.build_dense();
        prop_assert!(rel_err_c(&dense::matvec(&t, &x), &b) <= 1e-9);
        let x_ref = dense::matvec(&dense::inverse(&t).unwrap(), &b);
        prop_assert!(rel_err_c(&x, &x_ref) <= 1e-9);
    }

    #[test]
    fn inverse_forms_match_dense(n in 1usize..=48, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_pd(&mut r, n);
        let f = factorize(&u, true).unwrap();
        let inv = dense::inverse(&u.build_dense()).unwrap();
        prop_assert!(rel_err_mat(&f.explicit_inverse(), &inv) <= 1e-9);

        let p = f.cholesky_factor().unwrap();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            f.pivots().iter().map(|&p| C64::new(1.0 / p, 0.0)),
        ));
        prop_assert!(rel_err_mat(&(p * d * p.adjoint()), &inv) <= 1e-9);

        let gs = dense::gohberg_semencul_inverse(f.pivots(), f.gs_coeffs());
        prop_assert!(rel_err_mat(&gs, &inv) <= 1e-9);

        prop_assert!(rel_err(&f.trace_of_inverse_diagonals(), &adjoint(&inv).unwrap()) <= 1e-9);
        let tr2 = (&inv * &inv).trace().re;
        prop_assert!((f.trace_inv_sq() - tr2).abs() <= 1e-9 * tr2);
    }

    #[test]
    fn logdet_matches_dense(n in 1usize..=64, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_pd(&mut r, n);
        let ld = factorize(&u, false).unwrap().logdet();
        let ld_ref = dense::logdet(&u.build_dense()).unwrap();
        prop_assert!((ld - ld_ref).abs() <= 1e-9 * ld_ref.abs().max(1.0));
    }

    #[test]
    fn logdet_scales_with_n(n in 1usize..=32, seed in any::<u64>(), alpha in 0.1f64..10.0) {
        let mut r = rng(seed);
        let u = random_pd(&mut r, n);
        let scaled = ToeplitzParam::new(u.as_slice().iter().map(|a| alpha * a).collect()).unwrap();
        let a = factorize(&u, false).unwrap().logdet();
        let b = factorize(&scaled, false).unwrap().logdet();
        let expect = a + n as f64 * alpha.ln();
        prop_assert!((b - expect).abs() <= 1e-10 * expect.abs().max(1.0));
    }

    #[test]
    fn adjoint_is_trace_dual(n in 1usize..=32, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u: Vec<f64> = (0..2 * n - 1).map(|_| r.random_range(-1.0..1.0)).collect();
        let u = ToeplitzParam::new(u).unwrap();
        let g = DMatrix::from_fn(n, n, |_, _| cn(&mut r));
        let b = &g + g.adjoint();
        let lhs = (u.build_dense() * &b).trace();
        let rhs = u.dot(&adjoint(&b).unwrap());
        prop_assert!(lhs.im.abs() <= 1e-10 * b.norm() * (n as f64));
        prop_assert!((lhs.re - rhs).abs() <= 1e-10 * b.norm() * (n as f64));
    }

    #[test]
    fn fast_adjoints_match_direct(n in 1usize..=64, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = cvec(&mut r, n);
        let b = cvec(&mut r, n);
        let va = DMatrix::from_column_slice(n, 1, &a);
        let vb = DMatrix::from_column_slice(n, 1, &b);
        prop_assert!(rel_err(&rank1_adjoint(&a), &adjoint(&(&va * va.adjoint())).unwrap()) <= 1e-12);
        let m = &va * vb.adjoint() + &vb * va.adjoint();
        prop_assert!(rel_err(&outer_adjoint(&a, &b), &adjoint(&m).unwrap()) <= 1e-12);
    }

    #[test]
    fn matvec_matches_dense(n in 1usize..=64, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u: Vec<f64> = (0..2 * n - 1).map(|_| r.random_range(-1.0..1.0)).collect();
        let u = ToeplitzParam::new(u).unwrap();
        let b = cvec(&mut r, n);
        prop_assert!(rel_err_c(&matvec(&u, &b).unwrap(), &dense::matvec(&u.build_dense(), &b)) <= 1e-12);
    }

    #[test]
    fn pd_detection_agrees_with_eigenvalues(
        n in 2usize..=24,
        seed in any::<u64>(),
        margin in prop_oneof![-1.0f64..-1e-6, 1e-6f64..1.0],
    ) {
        let mut r = rng(seed);
        let base = random_pd(&mut r, n);
        let lmin = dense::min_eigenvalue(&base.build_dense());
        // T(u + c e0) = T(u) + 2c I
        let u = base.shift_diagonal((margin - lmin) / 2.0);
        prop_assert_eq!(factorize(&u, false).is_ok(), margin > 0.0);
    }

    #[test]
    fn solves_are_deterministic(n in 1usize..=32, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_pd(&mut r, n);
        let b = cvec(&mut r, n);
        let x1 = factorize(&u, false).unwrap().solve(&b).unwrap();
        let x2 = factorize(&u, false).unwrap().solve(&b).unwrap();
        prop_assert_eq!(x1, x2);
    }
}
