mod common;

use cavity_kraus::kraus::{DiscreteOptions, JumpSpec};
use cavity_kraus::linalg::{hermitian_eigenvalues, max_abs_diff, spectral_norm, CMatrix3, C64};
use cavity_kraus::metrics::{compare, distance, log_log_slope, relative_error};
use cavity_kraus::model::initial_state;
use cavity_kraus::oracle::{integrate_rk4, lindblad_rhs, matrix_exponential, IntegratorConfig};
use cavity_kraus::propagator::evolve_analytic;
use cavity_kraus::DensityMatrix;
use common::{arb_density, arb_matrix, arb_params, params, sup_norm};
use nalgebra::SMatrix;
use proptest::prelude::*;

#[test]
fn rk4_is_fourth_order() {
    let p = params(2.0, 4.0, 2.0);
    let rho = initial_state(0.7).unwrap();
    let exact = evolve_analytic(&p, &rho, 1.0).unwrap();
    let pts: Vec<(f64, f64)> = [20usize, 40, 80, 160]
        .iter()
        .map(|&n| {
            let r = integrate_rk4(&p, &rho, 1.0, IntegratorConfig::with_steps(n)).unwrap();
            (n as f64, max_abs_diff(r.matrix(), exact.matrix()))
        })
        .collect();
    let slope = log_log_slope(&pts).unwrap();
    assert!((slope + 4.0).abs() < 0.3, "slope {slope}");
}

#[test]
fn global_error_is_first_order_for_several_angles() {
    let p = params(2.0, 4.0, 2.0);
    let j = JumpSpec::split(p.kappa);
    for theta in [0.3, 1.0, 2.0, 2.8] {
        let pts: Vec<(f64, f64)> = [100usize, 1000, 10_000]
            .iter()
            .map(|&n| (n as f64, compare(&p, theta, 1.0, n, &j, DiscreteOptions::default()).unwrap().distance))
            .collect();
        let slope = log_log_slope(&pts).unwrap();
        assert!((slope + 1.0).abs() <= 0.2, "θ={theta} slope {slope}");
    }
}

#[test]
fn relative_error_tracks_omega_squared_over_n() {
    let p = params(2.0, 4.0, 2.0);
    let j = JumpSpec::split(p.kappa);
    for n in [100usize, 1000, 10_000] {
        let r = compare(&p, std::f64::consts::FRAC_PI_4, 1.0, n, &j, DiscreteOptions::default()).unwrap();
        let ratio = r.relative_error_abs() / r.re_approx;
        assert!((0.1..=10.0).contains(&ratio), "n={n} ratio {ratio}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rhs_preserves_hermiticity_and_trace(p in arb_params(), rho in arb_density()) {
        let d = lindblad_rhs(&p, rho.matrix());
        prop_assert!(max_abs_diff(&d, &d.adjoint()) <= 1e-14);
        prop_assert!(d.trace().norm() <= 1e-13);
    }

    #[test]
    fn rhs_is_linear(p in arb_params(), a in arb_matrix(), b in arb_matrix(), s in -2.0f64..2.0) {
        let lhs = lindblad_rhs(&p, &(a + b * C64::new(s, 0.0)));
        let rhs = lindblad_rhs(&p, &a) + lindblad_rhs(&p, &b) * C64::new(s, 0.0);
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn expm_semigroup(m in arb_matrix(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
        let whole = matrix_exponential(&m, s + t).unwrap();
        let parts = matrix_exponential(&m, s).unwrap() * matrix_exponential(&m, t).unwrap();
        prop_assert!(sup_norm(&(whole - parts)) <= 1e-10 * sup_norm(&whole).max(1.0));
    }

    #[test]
    fn expm_inverse(m in arb_matrix(), t in 0.0f64..2.0) {
        let prod = matrix_exponential(&m, t).unwrap() * matrix_exponential(&m, -t).unwrap();
        prop_assert!(sup_norm(&(prod - SMatrix::<C64, 3, 3>::identity())) <= 1e-11);
    }

    #[test]
    fn rk4_matches_analytic(p in arb_params(), rho in arb_density(), t in 0.0f64..2.0) {
        let steps = (200.0 * p.max_rate() * t).ceil().max(1.0) as usize;
        let r = integrate_rk4(&p, &rho, t, IntegratorConfig::with_steps(steps)).unwrap();
        let a = evolve_analytic(&p, &rho, t).unwrap();
        prop_assert!(max_abs_diff(r.matrix(), a.matrix()) <= 1e-7);
    }

    #[test]
    fn spectral_norm_matches_svd(m in arb_matrix()) {
        let sv = m.singular_values();
        prop_assert!((spectral_norm(&m) - sv.max()).abs() <= 1e-12);
    }

    #[test]
    fn norm_axioms(a in arb_matrix(), b in arb_matrix(), s in -3.0f64..3.0, phase in 0.0f64..6.3) {
        let scaled = a * C64::from_polar(s, phase);
        prop_assert!((spectral_norm(&scaled) - s.abs() * spectral_norm(&a)).abs() <= 1e-12);
        prop_assert!(spectral_norm(&(a + b)) <= spectral_norm(&a) + spectral_norm(&b) + 1e-12);
        prop_assert!(spectral_norm(&a) + 1e-12 >= sup_norm(&a));
        prop_assert!(spectral_norm(&a) <= a.norm() + 1e-12);
    }

    #[test]
    fn eigenvalues_match_nalgebra(m in arb_matrix()) {
        let h: CMatrix3 = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let ours = hermitian_eigenvalues(&h);
        let mut theirs: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&theirs) {
            prop_assert!((x - y).abs() <= 1e-12, "{:?} vs {:?}", ours, theirs);
        }
    }

    #[test]
    fn distance_is_a_metric(a in arb_density(), b in arb_density(), c in arb_density()) {
        prop_assert_eq!(distance(&a, &a), 0.0);
        prop_assert!((distance(&a, &b) - distance(&b, &a)).abs() <= 1e-14);
        prop_assert!(distance(&a, &c) <= distance(&a, &b) + distance(&b, &c) + 1e-12);
    }

    #[test]
    fn relative_error_scales(rho in arb_density(), s in 0.1f64..3.0) {
        let scaled = DensityMatrix::from_matrix(rho.matrix() * C64::new(s, 0.0));
        prop_assert!((relative_error(&scaled, &rho).unwrap() - (s - 1.0)).abs() <= 1e-12);
    }
}
