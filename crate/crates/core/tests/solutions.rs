mod common;

use std::collections::BTreeMap;

use jordan_core::fieldfn::{Field, Point, ScalarField};
use jordan_core::solutions::*;
use jordan_core::SolveError;
use rand::Rng;

fn canonical(u01: &str, u02: &str, f1: &str) -> FamilyConfig {
    let c = BTreeMap::new();
    let data = InitialData::from_exprs(2, &[(0, u01), (1, u02)], &c).unwrap();
    let params = Params { f1: Some(ScalarField::parse(f1, 2).unwrap()), ..Default::default() };
    FamilyConfig::new(FamilyKind::Canonical2, Variant::Paper, params, data).unwrap()
}

fn all_fixtures() -> Vec<FamilyConfig> {
    let mut v = Vec::new();
    for kind in FamilyKind::ALL {
        for variant in [Variant::Paper, Variant::Rederived] {
            v.push(fixture(kind, variant).unwrap().0);
        }
    }
    v
}

/// Max over rows of |u_t − A(u) u_x| by centred differences.
fn pde_defect(fc: &FamilyConfig, x: f64, t: f64, h: f64) -> f64 {
    let e = |x, t| fc.eval_solution(x, t).unwrap();
    let (u, xp, xm, tp, tm) = (e(x, t), e(x + h, t), e(x - h, t), e(x, t + h), e(x, t - h));
    let a = fc.system().assemble(&Point::new(t, x, u)).unwrap();
    (0..fc.n())
        .map(|r| {
            let mut s = (tp[r] - tm[r]) / (2.0 * h);
            for c in 0..fc.n() {
                s -= a[(r, c)] * (xp[c] - xm[c]) / (2.0 * h);
            }
            s.abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn canonical_characteristic_examples() {
    let fc = canonical("0", "s", "1");
    assert!((fc.solve_sigma(1.0, 0.5).unwrap() - 2.0).abs() < 1e-12);
    let u = fc.eval_solution(1.0, 0.5).unwrap();
    assert!((u[0] - 2f64.ln()).abs() < 1e-12);
    assert!((u[1] - 2.0).abs() < 1e-12);
    for t in [0.0, 0.3, 1.0] {
        assert!((fc.jacobian_x_sigma(0.7, t) - (1.0 - t)).abs() < 1e-15);
    }
    let fc = canonical("0", "0.75", "1");
    assert!((fc.solve_sigma(0.2, 0.4).unwrap() - (0.2 + 0.75 * 0.4)).abs() < 1e-12);
}

#[test]
fn t_zero_returns_the_data() {
    for fc in all_fixtures() {
        for x in [0.1, 0.45, 0.9] {
            assert_eq!(fc.solve_sigma(x, 0.0).unwrap(), x);
            assert_eq!(fc.jacobian_x_sigma(x, 0.0), 1.0);
        }
    }
}

#[test]
fn initial_condition_recovery() {
    let mut r = common::rng(11);
    for fc in all_fixtures() {
        let (lo, hi) = fc.support();
        let (lo, hi) = (lo.max(-1.0), hi.min(2.0));
        for _ in 0..50 {
            let x = r.random_range(lo..hi);
            let u = fc.eval_solution(x, 0.0).unwrap();
            let u0 = fc.eval_at_sigma(x, 0.0).unwrap();
            for (i, d) in fc.data().iter() {
                let v = d.eval(x).unwrap();
                assert!((u[i] - v).abs() < 1e-10, "{} u{}", fc.kind(), i + 1);
            }
            assert_eq!(u, u0);
        }
    }
}

#[test]
fn sigma_solver_contract() {
    let mut r = common::rng(12);
    for fc in all_fixtures() {
        for _ in 0..20 {
            let x = r.random_range(0.1..0.9);
            let t = r.random_range(0.05..0.4);
            let s = fc.solve_sigma(x, t).unwrap();
            let g = fc.char_x(s, t).unwrap() - x;
            assert!(g.abs() < 1e-12, "{} residual {g}", fc.kind());
            assert!(fc.jacobian_x_sigma(s, t) > 0.0);
            let again = fc.solve_sigma_from(x, t, Some(s + 0.01)).unwrap();
            assert!((again - s).abs() < 1e-10);
        }
    }
}

#[test]
fn canonical_transport_of_u2() {
    let fc = canonical("0.3*sin(s)", "0.5 + 0.2*s", "1 + 0.1*u2");
    let mut r = common::rng(13);
    let mut checked = 0;
    for _ in 0..100 {
        let s = r.random_range(-0.5..0.5);
        let t = r.random_range(0.0..0.5);
        let x = fc.char_x(s, t).unwrap();
        let Ok(u) = fc.eval_solution(x, t) else { continue };
        assert!((u[1] - (0.5 + 0.2 * s)).abs() < 1e-10);
        checked += 1;
    }
    assert!(checked > 90);
}

#[test]
fn hardrod1_with_zero_k_keeps_u3_and_u4() {
    let c = BTreeMap::new();
    let data = InitialData::from_exprs(4, &[(0, "2 + 0.1*s"), (1, "1 + 0.1*s"), (3, "3 - 0.1*s")], &c).unwrap();
    let params = Params {
        numbers: [("a".into(), 1.0), ("k".into(), 0.0), ("h".into(), 2.0)].into(),
        c1: Some(ScalarField::parse("1", 4).unwrap()),
        ..Default::default()
    };
    let fc = FamilyConfig::new(FamilyKind::HardRod1, Variant::Rederived, params, data).unwrap();
    for (x, t) in [(0.2, 0.1), (0.5, 0.3)] {
        let s = fc.solve_sigma(x, t).unwrap();
        let u = fc.eval_solution(x, t).unwrap();
        assert_eq!(u[2], 2.0);
        assert!((u[3] - (3.0 - 0.1 * s)).abs() < 1e-14);
    }
}

#[test]
fn closure_examples() {
    let spec = ClosureSpec { produce: vec![1], sigma_range: (0.0, 1.0), step: 0.01, anchor: 0.0, anchors: vec![(1, 0.0)] };
    let params = || Params { f1: Some(ScalarField::parse("1", 2).unwrap()), ..Default::default() };
    let c = BTreeMap::new();
    let free = InitialData::from_exprs(2, &[(0, "0")], &c).unwrap();
    let (fc, rep) = close_initial_data(FamilyKind::Canonical2, Variant::Paper, params(), free, &spec).unwrap();
    for s in [0.0, 0.123, 0.5, 0.999] {
        assert!((fc.data().get(1).unwrap().eval(s).unwrap() - s).abs() < 1e-10);
    }
    assert!(rep.max() < 1e-10);

    let free = InitialData::from_exprs(2, &[(0, "s")], &c).unwrap();
    let (fc, _) = close_initial_data(FamilyKind::Canonical2, Variant::Paper, params(), free, &spec).unwrap();
    for s in [0.0, 0.123, 0.5, 0.999] {
        assert!((fc.data().get(1).unwrap().eval(s).unwrap() - (s.exp() - 1.0)).abs() < 1e-8);
    }
}

#[test]
fn closure_with_zero_k_holds_u04() {
    let c = BTreeMap::new();
    let free = InitialData::from_exprs(4, &[(0, "2 + 0.1*s")], &c).unwrap();
    let params = Params {
        numbers: [("a".into(), 1.0), ("k".into(), 0.0), ("h".into(), 2.0)].into(),
        c1: Some(ScalarField::parse("1", 4).unwrap()),
        ..Default::default()
    };
    let spec = ClosureSpec {
        produce: vec![1, 3],
        sigma_range: (-1.0, 1.0),
        step: 0.05,
        anchor: 0.0,
        anchors: vec![(1, 1.0), (3, 3.0)],
    };
    let (fc, _) = close_initial_data(FamilyKind::HardRod1, Variant::Rederived, params, free, &spec).unwrap();
    for s in [-0.9, 0.0, 0.7] {
        assert_eq!(fc.data().get(3).unwrap().eval(s).unwrap(), 3.0);
    }
}

#[test]
fn closure_rejects_singular_rhs() {
    let c = BTreeMap::new();
    // h u01 = a^2 at s = 0
    let free = InitialData::from_exprs(4, &[(0, "0.5 + s")], &c).unwrap();
    let params = Params {
        numbers: [("a".into(), 1.0), ("k".into(), 0.5), ("h".into(), 2.0)].into(),
        c1: Some(ScalarField::parse("1", 4).unwrap()),
        ..Default::default()
    };
    let spec = ClosureSpec {
        produce: vec![1, 3],
        sigma_range: (0.0, 1.0),
        step: 0.05,
        anchor: 0.0,
        anchors: vec![(1, 1.0), (3, 3.0)],
    };
    let e = close_initial_data(FamilyKind::HardRod1, Variant::Rederived, params, free, &spec).unwrap_err();
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn closure_makes_constraints_hold_at_t0() {
    // u²_x(x, 0) = f¹(u²) e^{u¹}
    let (fc, _) = fixture(FamilyKind::HardRod1, Variant::Rederived).unwrap();
    let cs = fc.constraints().unwrap();
    let h = 1e-4;
    for x in [-1.0, -0.3, 0.4, 1.2, 2.0] {
        let u = fc.eval_solution(x, 0.0).unwrap();
        for c in cs.items() {
            let d = (fc.eval_solution(x + h, 0.0).unwrap()[c.target] - fc.eval_solution(x - h, 0.0).unwrap()[c.target]) / (2.0 * h);
            let phi = c.field.eval(&Point::new(0.0, x, u.clone())).unwrap();
            assert!((d - phi).abs() < 1e-6, "{} at {x}: {d} vs {phi}", c.label);
        }
    }
    let c = BTreeMap::new();
    let spec = ClosureSpec { produce: vec![1], sigma_range: (-1.0, 0.6), step: 0.01, anchor: 0.0, anchors: vec![(1, 0.5)] };
    let free = InitialData::from_exprs(2, &[(0, "0.3*s")], &c).unwrap();
    let params = Params { f1: Some(ScalarField::parse("1 + u2^2", 2).unwrap()), ..Default::default() };
    let (fc, _) = close_initial_data(FamilyKind::Canonical2, Variant::Paper, params, free, &spec).unwrap();
    for x in [-0.8, 0.0, 0.5] {
        let u = fc.eval_solution(x, 0.0).unwrap();
        let d = (fc.eval_solution(x + h, 0.0).unwrap()[1] - fc.eval_solution(x - h, 0.0).unwrap()[1]) / (2.0 * h);
        assert!((d - (1.0 + u[1] * u[1]) * u[0].exp()).abs() < 1e-6);
    }
}

#[test]
fn rederived_families_solve_the_system() {
    for kind in FamilyKind::ALL {
        let (fc, _) = fixture(kind, Variant::Rederived).unwrap();
        for (x, t) in [(0.2, 0.1), (0.5, 0.25), (0.8, 0.4)] {
            let d = pde_defect(&fc, x, t, 1e-4);
            assert!(d < 1e-6, "{kind} at ({x}, {t}): {d}");
        }
    }
}

#[test]
fn printed_wdvv_t_and_hardrod1_do_not() {
    for kind in [FamilyKind::WdvvT, FamilyKind::HardRod1] {
        let (fc, _) = fixture(kind, Variant::Paper).unwrap();
        assert!(pde_defect(&fc, 0.5, 0.25, 1e-4) > 1e-3, "{kind}");
    }
}

#[test]
fn canonical_grid_flags_breaking() {
    let fc = canonical("0", "s", "1");
    let g = GridSpec { x0: 0.0, x1: 1.0, nx: 5, t0: 0.5, t1: 1.5, nt: 3 };
    let rows = eval_grid(&fc, &g).unwrap();
    assert_eq!(rows.len(), 15);
    for r in &rows {
        if r.t >= 1.0 {
            assert_eq!(r.status, PointStatus::Broken, "{r:?}");
        } else {
            assert_eq!(r.status, PointStatus::Ok);
        }
    }
    let single = eval_grid(&fc, &GridSpec { x0: 1.0, x1: 1.0, nx: 1, t0: 0.5, t1: 0.5, nt: 1 }).unwrap();
    assert_eq!(single[0].u, fc.eval_solution(1.0, 0.5).unwrap());
}

#[test]
fn grid_at_t0_samples_the_data() {
    for fc in all_fixtures() {
        let rows = eval_grid(&fc, &GridSpec { x0: 0.0, x1: 1.0, nx: 11, t0: 0.0, t1: 0.0, nt: 1 }).unwrap();
        for r in rows {
            assert_eq!(r.u, fc.eval_at_sigma(r.x, 0.0).unwrap());
        }
    }
}

#[test]
fn outside_spline_support_is_reported() {
    let (fc, _) = fixture(FamilyKind::HardRod2, Variant::Paper).unwrap();
    assert!(matches!(fc.solve_sigma(10.0, 0.0), Err(SolveError::OutOfSupport { .. })));
    let rows = eval_grid(&fc, &GridSpec { x0: 9.0, x1: 10.0, nx: 2, t0: 0.1, t1: 0.1, nt: 1 }).unwrap();
    assert!(rows.iter().all(|r| r.status == PointStatus::OutOfSupport));
}

#[test]
fn csv_layout() {
    let fc = canonical("0", "s", "1");
    let rows = eval_grid(&fc, &GridSpec { x0: 1.0, x1: 1.0, nx: 1, t0: 0.5, t1: 1.5, nt: 2 }).unwrap();
    let mut out = Vec::new();
    write_csv(&rows, 2, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,t,status,u1,u2");
    assert_eq!(lines[1], "1.0000000000000000e0,5.0000000000000000e-1,ok,6.9314718055994529e-1,2.0000000000000000e0");
    assert!(lines[2].ends_with("broken,NaN,NaN"));
}

#[test]
fn json_descriptor_errors() {
    assert_eq!(FamilyConfig::from_json("{").unwrap_err().exit_code(), 2);
    let bad = r#"{"family":"hardrod2","params":{"a":1,"k":0,"c1":"1"},"initial_data":{"u01":"s","u02":"s","u03":"s","u04":"s"}}"#;
    assert_eq!(FamilyConfig::from_json(bad).unwrap_err().exit_code(), 2);
    let bad = r#"{"family":"canonical2","initial_data":{"u01":"s","u02":"s"}}"#;
    assert!(FamilyConfig::from_json(bad).is_err());
    let bad = r#"{"family":"canonical2","params":{"f1":"1"},"initial_data":{"u01":"u1"}}"#;
    assert!(FamilyConfig::from_json(bad).is_err());
    let bad = r#"{"family":"canonical2","params":{"f1":"1"},"initial_data":{"u01":"0",
        "closure":{"produce":["u02"],"sigma_range":[0,1],"step":0.1,"anchors":{"u02(0)":0,"u02(1)":1}}}}"#;
    assert!(FamilyConfig::from_json(bad).is_err());
}

#[test]
fn fixtures_parse_and_close() {
    for kind in FamilyKind::ALL {
        let (fc, rep) = fixture(kind, Variant::Paper).unwrap();
        assert_eq!(fc.kind(), kind);
        if let Some(rep) = rep {
            assert!(rep.max() < 1e-6, "{kind}: {}", rep.max());
        }
    }
}
