use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use super::dual::{Dual, Scalar};
use super::expr::{self, Bindings, Expr, Var};
use crate::error::{Error, EvalError, ParseError};

/// Independent variables `(t, x)` and field values `u¹..uⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: f64,
    pub u: Vec<f64>,
}

impl Point {
    pub fn new(t: f64, x: f64, u: Vec<f64>) -> Self {
        Self { t, x, u }
    }

    /// A point at `t = x = 0`.
    pub fn from_u(u: &[f64]) -> Self {
        Self { t: 0.0, x: 0.0, u: u.to_vec() }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.u.iter().all(|v| v.is_finite())
    }
}

/// First derivatives `(∂t, ∂x, ∂u¹..∂uⁿ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub dt: f64,
    pub dx: f64,
    pub du: Vec<f64>,
}

/// A field whose evaluation is written once for any [`Scalar`].
///
/// Implementors get exact derivatives through [`Field`] for free.
pub trait GenericField: Send + Sync {
    fn arity(&self) -> usize;
    fn eval_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<T, EvalError>;
}

/// Object-safe view of a scalar field over `(t, x, u)`.
pub trait Field: Send + Sync {
    fn arity(&self) -> usize;
    fn eval(&self, p: &Point) -> Result<f64, EvalError>;
    fn grad(&self, p: &Point) -> Result<Gradient, EvalError>;
}

fn check_arity(arity: usize, p: &Point) -> Result<(), EvalError> {
    if p.u.len() != arity {
        return Err(EvalError::Arity { expected: arity, got: p.u.len() });
    }
    Ok(())
}

impl<F: GenericField> Field for F {
    fn arity(&self) -> usize {
        GenericField::arity(self)
    }

    fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        check_arity(GenericField::arity(self), p)?;
        self.eval_at(p.t, p.x, &p.u)
    }

    fn grad(&self, p: &Point) -> Result<Gradient, EvalError> {
        check_arity(GenericField::arity(self), p)?;
        let n = p.u.len();
        // one forward pass per direction: 0 = t, 1 = x, 2.. = u
        let mut parts = Vec::with_capacity(n + 2);
        let mut u: Vec<Dual<f64>> = p.u.iter().map(|&v| Dual::constant(v)).collect();
        for dir in 0..n + 2 {
            if dir >= 2 {
                u[dir - 2] = Dual::var(p.u[dir - 2]);
            }
            let t = Dual::seeded(p.t, dir == 0);
            let x = Dual::seeded(p.x, dir == 1);
            parts.push(self.eval_at(t, x, &u)?.eps);
            if dir >= 2 {
                u[dir - 2] = Dual::constant(p.u[dir - 2]);
            }
        }
        Ok(Gradient { dt: parts[0], dx: parts[1], du: parts[2..].to_vec() })
    }
}

impl<F: Field + ?Sized> Field for Arc<F> {
    fn arity(&self) -> usize {
        (**self).arity()
    }
    fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        (**self).eval(p)
    }
    fn grad(&self, p: &Point) -> Result<Gradient, EvalError> {
        (**self).grad(p)
    }
}

/// A parsed expression over `(t, x, s, u¹..uⁿ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    source: String,
    arity: usize,
    expr: Expr,
    free: BTreeSet<Var>,
}

impl ScalarField {
    pub fn parse(src: &str, arity: usize) -> Result<Self, ParseError> {
        Self::parse_with(src, arity, &BTreeMap::new())
    }

    /// Parse with named numeric constants substituted for identifiers.
    pub fn parse_with(src: &str, arity: usize, constants: &BTreeMap<String, f64>) -> Result<Self, ParseError> {
        let expr = expr::parse(src, arity, constants)?;
        let mut free = BTreeSet::new();
        expr.free_vars(&mut free);
        Ok(Self { source: src.to_string(), arity, expr, free })
    }

    /// Like [`ScalarField::parse_with`] but wraps the error with its source text.
    pub fn from_source(src: &str, arity: usize, constants: &BTreeMap<String, f64>) -> Result<Self, Error> {
        Self::parse_with(src, arity, constants).map_err(|source| Error::Parse { src: src.to_string(), source })
    }

    pub fn constant(v: f64, arity: usize) -> Self {
        Self {
            source: format!("{v:?}"),
            arity,
            expr: Expr::Num(v),
            free: BTreeSet::new(),
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn free_vars(&self) -> &BTreeSet<Var> {
        &self.free
    }

    /// True when every free variable is in `allowed`.
    pub fn depends_only_on(&self, allowed: &[Var]) -> bool {
        self.free.iter().all(|v| allowed.contains(v))
    }

    /// Same expression re-typed for a different arity.
    pub fn with_arity(&self, arity: usize) -> Result<Self, ParseError> {
        let printed = self.expr.to_string();
        let mut f = Self::parse(&printed, arity)?;
        f.source = self.source.clone();
        Ok(f)
    }

    /// Evaluate with an explicit characteristic label bound to `s`.
    pub fn eval_full<T: Scalar>(&self, t: T, x: T, s: T, u: &[T]) -> Result<T, EvalError> {
        self.expr.eval(&Bindings { t, x, s, u })
    }

    /// Evaluate a function of `s` alone (initial data).
    pub fn eval_sigma<T: Scalar>(&self, sigma: T) -> Result<T, EvalError> {
        let z = T::cst(0.0);
        let u = vec![z; self.arity];
        self.expr.eval(&Bindings { t: z, x: z, s: sigma, u: &u })
    }

    /// Evaluate a function of a single field value placed in slot `slot`.
    pub fn eval_slot<T: Scalar>(&self, slot: usize, v: T) -> Result<T, EvalError> {
        let z = T::cst(0.0);
        let mut u = vec![z; self.arity];
        u[slot] = v;
        self.expr.eval(&Bindings { t: z, x: z, s: z, u: &u })
    }
}

impl GenericField for ScalarField {
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<T, EvalError> {
        self.expr.eval(&Bindings { t, x, s: T::cst(0.0), u })
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

/// Parse `src` as a field of arity `arity`.
pub fn parse_expression(src: &str, arity: usize) -> Result<ScalarField, ParseError> {
    ScalarField::parse(src, arity)
}
