//! Adaptive Simpson quadrature, generic over [`Scalar`].
//!
//! The interval is mapped onto `[0, 1]` so that derivatives with respect to
//! the endpoints travel through the node positions.

use super::dual::Scalar;
use super::field::GenericField;
use crate::error::EvalError;

const MAX_DEPTH: u32 = 40;
const TOL: f64 = 1e-12;

struct Panel<T> {
    a: f64,
    b: f64,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

fn simpson<T: Scalar>(h: f64, fa: T, fm: T, fb: T) -> T {
    (fa + fm.scale(4.0) + fb).scale(h / 6.0)
}

/// `∫_a^b f(ξ) dξ` to an absolute tolerance of about `1e-12`.
pub fn integrate<T, F>(f: F, a: T, b: T) -> Result<T, EvalError>
where
    T: Scalar,
    F: Fn(T) -> Result<T, EvalError>,
{
    let len = b - a;
    if len.re() == 0.0 && !T::DIFFERENTIATED {
        return Ok(T::cst(0.0));
    }
    let g = |tau: f64| f(a + len.scale(tau));
    let tol = if len.re() == 0.0 { TOL } else { TOL / len.re().abs() };
    let (fa, fm, fb) = (g(0.0)?, g(0.5)?, g(1.0)?);
    let root = Panel { a: 0.0, b: 1.0, fa, fm, fb, whole: simpson(1.0, fa, fm, fb) };
    let mut total = T::cst(0.0);
    // explicit stack of (panel, tolerance, depth)
    let mut stack = vec![(root, tol, 0u32)];
    while let Some((p, tol, depth)) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let h = p.b - p.a;
        let flm = g(0.5 * (p.a + m))?;
        let frm = g(0.5 * (m + p.b))?;
        let left = simpson(0.5 * h, p.fa, flm, p.fm);
        let right = simpson(0.5 * h, p.fm, frm, p.fb);
        let delta = (left + right - p.whole).re();
        let floor = 64.0 * f64::EPSILON * (left + right).re().abs();
        if delta.abs() <= (15.0 * tol).max(floor) {
            total = total + left + right + (left + right - p.whole).scale(1.0 / 15.0);
            continue;
        }
        if depth >= MAX_DEPTH || !delta.is_finite() {
            return Err(EvalError::Quadrature { a: a.re(), b: b.re() });
        }
        stack.push((Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, 0.5 * tol, depth + 1));
        stack.push((Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, 0.5 * tol, depth + 1));
    }
    Ok(total * len)
}

/// `∫_a^b f(t, x, ξ, u², …, uⁿ) dξ` with the remaining coordinates frozen.
pub fn integrate_u1_at<T, F>(f: &F, t: T, x: T, u: &[T], a: T, b: T) -> Result<T, EvalError>
where
    T: Scalar,
    F: GenericField + ?Sized,
{
    if u.is_empty() {
        return Err(EvalError::Arity { expected: 1, got: 0 });
    }
    integrate(
        |xi| {
            let mut v = u.to_vec();
            v[0] = xi;
            f.eval_at(t, x, &v)
        },
        a,
        b,
    )
}

/// `∫_a^b f dξ` along the `u¹` axis through the point `p`.
pub fn integrate_u1<F: GenericField + ?Sized>(
    f: &F,
    p: &super::field::Point,
    a: f64,
    b: f64,
) -> Result<f64, EvalError> {
    integrate_u1_at(f, p.t, p.x, &p.u, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldfn::dual::Dual;
    use crate::fieldfn::field::{parse_expression, Point};

    #[test]
    fn polynomial_and_exponential() {
        let v: f64 = integrate(|x: f64| Ok(x * x), 0.0, 3.0).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let v: f64 = integrate(|x: f64| Ok(x.exp()), -1.0, 2.0).unwrap();
        assert!((v - (2f64.exp() - (-1f64).exp())).abs() < 1e-11);
    }

    #[test]
    fn endpoint_derivative_is_integrand() {
        // d/db ∫_0^b sin = sin b
        let b = Dual::var(1.3);
        let v = integrate(|x: Dual<f64>| Ok(x.sin()), Dual::constant(0.0), b).unwrap();
        assert!((v.eps - 1.3f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn along_first_coordinate() {
        let f = parse_expression("u1*u2", 2).unwrap();
        let v = integrate_u1(&f, &Point::from_u(&[0.0, 2.0]), 0.0, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn singular_integrand_fails() {
        let r: Result<f64, _> = integrate(|x: f64| if x == 0.0 { Ok(f64::INFINITY) } else { Ok(1.0 / x) }, 0.0, 1.0);
        assert!(r.is_err());
    }
}
