mod common;

use jordan_core::fieldfn::{integrate, integrate_u1, parse_expression, Dual, Field, Point, ScalarField};
use proptest::prelude::*;

/// Random smooth expressions in `t, x, u1, u2`, free of singular points.
fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("u1".to_string()),
        Just("u2".to_string()),
        Just("t".to_string()),
        Just("x".to_string()),
        (-3.0f64..3.0).prop_map(|c| format!("{c:.3}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}/(2 + sin({b}))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("tanh({a})")),
            inner.clone().prop_map(|a| format!("({a})^2")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.prop_map(|a| format!("exp(tanh({a}))")),
        ]
    })
}

fn point() -> impl Strategy<Value = Point> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(t, x, a, b)| Point::new(t, x, vec![a, b]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_round_trip(src in expr(), p in point()) {
        let f = parse_expression(&src, 2).unwrap();
        let printed = f.to_string();
        let g = parse_expression(&printed, 2).unwrap();
        prop_assert_eq!(f.expr(), g.expr());
        prop_assert_eq!(f.eval(&p).unwrap(), g.eval(&p).unwrap());
    }

    #[test]
    fn gradient_matches_finite_differences(src in expr(), p in point()) {
        let f = parse_expression(&src, 2).unwrap();
        let g = f.grad(&p).unwrap();
        let fd = common::fd_grad(&f, &p, 1e-3);
        let exact = [g.dt, g.dx, g.du[0], g.du[1]];
        for (a, b) in exact.iter().zip(&fd) {
            prop_assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{} vs {} for {}", a, b, src);
        }
    }

    #[test]
    fn upper_limit_derivative_is_the_integrand(src in expr(), p in point(), a in -1.0f64..1.0) {
        let f = parse_expression(&src, 2).unwrap();
        let b = p.u[0];
        let fb = f.eval(&p).unwrap();
        // d/db ∫_a^b f(ξ, u2) dξ = f(b, u2)
        let d = integrate(
            |xi: Dual<f64>| f.eval_full(Dual::constant(p.t), Dual::constant(p.x), Dual::constant(0.0), &[xi, Dual::constant(p.u[1])]),
            Dual::constant(a),
            Dual::var(b),
        )
        .unwrap();
        prop_assert!((d.eps - fb).abs() < 1e-9 * (1.0 + fb.abs()));
        prop_assert!((d.re - integrate_u1(&f, &p, a, b).unwrap()).abs() < 1e-14 * (1.0 + d.re.abs()));
    }

    #[test]
    fn polynomials_integrate_exactly(c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let f = ScalarField::parse(&format!("{c0:?} + {c1:?}*u1 + {c2:?}*u1^2"), 1).unwrap();
        let got = integrate_u1(&f, &Point::from_u(&[0.0]), a, b).unwrap();
        let anti = |v: f64| c0 * v + c1 * v * v / 2.0 + c2 * v * v * v / 3.0;
        prop_assert!((got - (anti(b) - anti(a))).abs() < 1e-12 * (1.0 + got.abs()));
    }
}

#[test]
fn integral_of_exponential() {
    let f = parse_expression("exp(u1)", 1).unwrap();
    let v = integrate_u1(&f, &Point::from_u(&[0.0]), 0.0, 1.0).unwrap();
    assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
}
