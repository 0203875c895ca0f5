mod common;

use common::*;
use num_complex::Complex64;
use numrad_core::harness::{sample_matrix, EnsembleKind, EnsembleSpec};
use numrad_core::linalg::{hermitian_norm, operator_norm, ComplexMatrix};
use numrad_core::numrange::*;
use proptest::prelude::*;

fn w(t: &ComplexMatrix) -> f64 {
    omega(t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_sandwich(t in matrix_strategy(8)) {
        let (om, n) = (w(&t), operator_norm(&t));
        prop_assert!(0.5 * n <= om + 1e-10 * (1.0 + n));
        prop_assert!(om <= n + 1e-10 * (1.0 + n));
    }

    #[test]
    fn adjoint_and_scaling_invariance(t in matrix_strategy(6), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let om = w(&t);
        prop_assert!(rel_close(w(&t.adjoint()), om, 1e-10));
        let c = Complex64::new(re, im);
        prop_assert!(rel_close(w(&t.scale(c)), c.norm() * om, 1e-10));
    }

    #[test]
    fn unitary_invariance(t in matrix_strategy(6), seed in any::<u64>()) {
        let u = sample_matrix(&EnsembleSpec::new(EnsembleKind::Unitary, t.rows(), seed)).unwrap();
        let conj = u.adjoint().multiply(&t).unwrap().multiply(&u).unwrap();
        prop_assert!(rel_close(w(&conj), w(&t), 1e-10));
    }

    #[test]
    fn witness_attains_radius(t in matrix_strategy(6)) {
        let r = numerical_radius(&t, DEFAULT_GRID, DEFAULT_THETA_TOL).unwrap();
        let attained = t.quadratic_form(&r.witness).unwrap().norm();
        prop_assert!((r.witness.norm() - 1.0).abs() < 1e-12);
        prop_assert!(attained <= r.omega + 1e-12 * (1.0 + r.omega));
        prop_assert!(attained >= r.omega - 1e-8 * (1.0 + r.omega));
    }

    #[test]
    fn hermitian_radius_is_spectral_radius(t in matrix_strategy(6)) {
        let h = t.hermitian_part();
        prop_assert!(rel_close(w(&h), hermitian_norm(&h).unwrap(), 1e-11));
    }

    #[test]
    fn boundary_points_lie_in_range_and_support(t in matrix_strategy(5)) {
        let om = w(&t);
        for p in range_boundary(&t, 24).unwrap() {
            prop_assert!(p.z.norm() <= om + 1e-9 * (1.0 + om));
            // support line: Re(e^{iθ} z) = λ_max(H(θ))
            let support = (Complex64::from_polar(1.0, p.theta) * p.z).re;
            let (_, top) = hermitian_form_extrema(&rotated_hermitian_part(&t, p.theta).unwrap()).unwrap();
            prop_assert!((support - top).abs() <= 1e-9 * (1.0 + om));
        }
    }
}

#[test]
fn radius_agrees_with_dense_oracle_across_ensembles() {
    let mut checked = 0;
    for (e, kind) in EnsembleKind::ALL.into_iter().enumerate() {
        for dim in 2..=8 {
            let spec = EnsembleSpec::new(kind, dim, 1000 + 17 * e as u64 + dim as u64);
            let t = sample_matrix(&spec).unwrap();
            let om = w(&t);
            let oracle = numerical_radius_oracle(&t, MIN_ORACLE_GRID).unwrap();
            assert!(
                (om - oracle).abs() <= 1e-8 * (1.0 + om),
                "{kind} {dim}: {om} vs {oracle}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 56);
}

#[test]
fn nilpotent_boundary_is_circle() {
    let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let pts = range_boundary(&t, 360).unwrap();
    assert_eq!(pts.len(), 360);
    assert!(pts.iter().all(|p| (p.z.norm() - 0.5).abs() < 1e-8));
}

#[test]
fn real_diagonal_boundary_is_segment() {
    let pts = range_boundary(&ComplexMatrix::from_diag(&[0.0, 1.0]), 90).unwrap();
    assert!(pts
        .iter()
        .all(|p| p.z.im.abs() < 1e-10 && (-1e-10..=1.0 + 1e-10).contains(&p.z.re)));
}
