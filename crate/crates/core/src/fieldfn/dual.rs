//! Forward-mode dual numbers.
//!
//! Every numeric routine that needs exact first derivatives is written
//! generically over [`Scalar`]. Instantiating it with `f64` gives values,
//! with [`Dual<f64>`] gives one directional derivative, and with
//! `Dual<Dual<f64>>` gives a mixed second derivative.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real-like number type usable by the expression evaluator and solvers.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when the type carries derivative information.
    const DIFFERENTIATED: bool;

    fn cst(v: f64) -> Self;
    /// The underlying real value (all tangent parts dropped).
    fn re(&self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn tanh(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn scale(self, k: f64) -> Self {
        self * Self::cst(k)
    }
}

impl Scalar for f64 {
    const DIFFERENTIATED: bool = false;

    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// A dual number `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    /// A variable seeded with unit tangent.
    pub fn var(re: T) -> Self {
        Self { re, eps: T::cst(1.0) }
    }

    pub fn constant(re: T) -> Self {
        Self { re, eps: T::cst(0.0) }
    }

    /// Lift with an explicit tangent selector.
    pub fn seeded(re: T, seed: bool) -> Self {
        if seed {
            Self::var(re)
        } else {
            Self::constant(re)
        }
    }

    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Self { re: f, eps: self.eps * df }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, eps: self.eps + o.eps }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, eps: self.eps - o.eps }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self { re: self.re * o.re, eps: self.re * o.eps + self.eps * o.re }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let q = self.re / o.re;
        Self { re: q, eps: (self.eps - q * o.eps) / o.re }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { re: -self.re, eps: -self.eps }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    const DIFFERENTIATED: bool = true;

    fn cst(v: f64) -> Self {
        Self::constant(T::cst(v))
    }
    fn re(&self) -> f64 {
        self.re.re()
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), T::cst(1.0) / self.re)
    }
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, T::cst(0.5) / s)
    }
    fn tanh(self) -> Self {
        let th = self.re.tanh();
        self.chain(th, T::cst(1.0) - th * th)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::cst(1.0);
        }
        let p = self.re.powi(n - 1);
        self.chain(p * self.re, p.scale(n as f64))
    }
}

/// Derivative of a scalar function of one variable at `x`.
pub fn derivative<F>(f: F, x: f64) -> f64
where
    F: Fn(Dual<f64>) -> Dual<f64>,
{
    f(Dual::var(x)).eps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::var(2.0);
        let y = Dual::constant(3.0);
        assert_eq!((x * y).eps, 3.0);
        assert_eq!((y / x).eps, -0.75);
        assert_eq!((x * x * x).eps, 12.0);
    }

    #[test]
    fn transcendental_derivatives() {
        let d = derivative(|x| x.exp(), 1.0);
        assert!((d - std::f64::consts::E).abs() < 1e-15);
        let d = derivative(|x| x.ln(), 4.0);
        assert_eq!(d, 0.25);
        let d = derivative(|x| x.sin(), 0.0);
        assert_eq!(d, 1.0);
        let d = derivative(|x| x.tanh(), 0.0);
        assert_eq!(d, 1.0);
        let d = derivative(|x| x.powi(3), 2.0);
        assert_eq!(d, 12.0);
    }

    #[test]
    fn nested_duals_give_second_derivative() {
        // f(x) = x^3 exp(x); f'' = (x^3 + 6x^2 + 6x) e^x
        let x0 = 0.7_f64;
        let x = Dual::new(Dual::var(x0), Dual::constant(1.0));
        let f = x.powi(3) * x.exp();
        let expected = (x0.powi(3) + 6.0 * x0 * x0 + 6.0 * x0) * x0.exp();
        assert!((f.eps.eps - expected).abs() < 1e-12);
        assert!((f.re.eps - f.eps.re).abs() < 1e-14);
    }
}
