mod common;

use jordan_core::fieldfn::{Point, ScalarField};
use jordan_core::hamiltonian::*;
use jordan_core::systems::{catalog, JordanSystem};
use jordan_core::Error;

fn f(src: &str) -> ScalarField {
    ScalarField::parse(src, 2).unwrap()
}

/// 2×2 degenerate blocks with `∂_{u²}((λ_{u²} − μ_{u¹})/μ) = 0`.
fn flat_cases() -> Vec<(JordanSystem, ScalarField)> {
    vec![
        (catalog::canonical(), f("1")),
        (catalog::canonical(), f("1 + u2^2")),
        (JordanSystem::from_exprs(&[&["u2", "u1 + 1"]], &[]).unwrap(), f("1")),
        (JordanSystem::from_exprs(&[&["3*u2 + 1", "2"]], &[]).unwrap(), f("exp(u2)")),
        (JordanSystem::from_exprs(&[&["0.5", "u1^2 + 1"]], &[]).unwrap(), f("2")),
    ]
}

#[test]
fn canonical_metric_satisfies_tsarev_conditions() {
    let m = build_metric(&catalog::canonical(), &f("1"), 0.0).unwrap();
    let mut r = common::rng(21);
    for _ in 0..100 {
        let p = common::random_point(&mut r, 2, -1.5, 1.5);
        let (s, c) = tsarev_residual(&catalog::canonical(), &m, &p).unwrap();
        assert_eq!(s, 0.0);
        assert!(c < 1e-10, "{c}");
    }
    for _ in 0..20 {
        let p = common::random_point(&mut r, 2, -1.5, 1.5);
        assert!(flatness_residual(&m, &p, 1e-4).unwrap() < 1e-6);
    }
}

#[test]
fn built_metrics_are_hamiltonian_and_flat() {
    let mut r = common::rng(22);
    for (sys, f1) in flat_cases() {
        let m = build_metric(&sys, &f1, 0.0).unwrap();
        for _ in 0..100 {
            let p = common::random_point(&mut r, 2, 0.2, 1.5);
            let (s, c) = tsarev_residual(&sys, &m, &p).unwrap();
            assert_eq!(s, 0.0);
            assert!(c < 1e-9, "{c}");
            let curv = flatness_residual(&m, &p, 1e-4).unwrap();
            assert!(curv < 1e-6, "{curv}");
        }
    }
}

#[test]
fn symmetry_residual_is_structurally_zero() {
    let mut r = common::rng(23);
    let sys = JordanSystem::from_exprs(&[&["u1*u2", "sin(u2) + 2"]], &[]).unwrap();
    for _ in 0..50 {
        let p = common::random_point(&mut r, 2, -1.0, 1.0);
        let m = HankelMetric2::from_exprs("2 + u1^2", "u1 - u2").unwrap();
        assert_eq!(tsarev_residual(&sys, &m, &p).unwrap().0, 0.0);
    }
}

#[test]
fn some_degenerate_blocks_give_curved_metrics() {
    // λ = u2², μ = 1 is degenerate but the metric is curved; the covariant conditions still hold
    let sys = JordanSystem::from_exprs(&[&["u2^2", "1"]], &[]).unwrap();
    let m = build_metric(&sys, &f("1"), 0.0).unwrap();
    let p = Point::from_u(&[0.4, 0.7]);
    assert!(tsarev_residual(&sys, &m, &p).unwrap().1 < 1e-10);
    // g12 = exp(2 u1 u2): R = -2 (ln g12)_{12}/g12 = -4/g12
    let expected = -4.0 / (2.0 * 0.4 * 0.7f64).exp();
    assert!((scalar_curvature(&m, &p, 1e-4).unwrap() - expected).abs() < 1e-6);
}

#[test]
fn non_degenerate_systems_are_rejected() {
    for (name, sys, degenerate) in catalog::all() {
        if sys.n() == 2 && !degenerate {
            assert!(matches!(build_metric(&sys, &f("1"), 0.0), Err(Error::Precondition(_))), "{name}");
        }
    }
}

#[test]
fn theta_coincides_with_closed_form_constraint() {
    let mut r = common::rng(24);
    for (sys, f1) in flat_cases() {
        for _ in 0..30 {
            let p = common::random_point(&mut r, 2, 0.2, 1.5);
            let rep = theta(&sys, &f1, 0.1, &p).unwrap();
            assert!(rep.diff < 1e-12 * rep.theta.abs().max(1.0), "{}", rep.diff);
        }
    }
}

#[test]
fn theta_metric_matches_for_canonical() {
    let sys = catalog::canonical();
    let a = build_metric(&sys, &f("1"), 0.0).unwrap();
    let b = theta_metric(&sys, &f("1"), 0.0).unwrap();
    for u in [[0.1, 0.2], [-0.7, 1.1]] {
        let p = Point::from_u(&u);
        assert!((a.at(&p).unwrap()[0][1] - b.at(&p).unwrap()[0][1]).abs() < 1e-12);
        let rep = theta(&sys, &f("1"), 0.0, &p).unwrap();
        assert!((rep.theta - u[0].exp()).abs() < 1e-12);
    }
}

#[test]
fn non_flat_sanity_sample() {
    let m = HankelMetric2::from_exprs("1", "u1^2 + u2^2").unwrap();
    let p = Point::from_u(&[0.5, 0.5]);
    let r = scalar_curvature(&m, &p, 1e-4).unwrap();
    assert!(r.is_finite());
}
