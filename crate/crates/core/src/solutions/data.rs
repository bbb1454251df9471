use std::collections::BTreeMap;

use super::spline::CubicSpline;
use crate::error::{Error, EvalError, Result};
use crate::fieldfn::{Dual, Scalar, ScalarField, Var};

/// One initial-data function `u₀ⁱ(σ)`.
#[derive(Clone, Debug)]
pub enum DataFn {
    Expr(ScalarField),
    Spline(CubicSpline),
}

impl DataFn {
    pub fn expr(f: ScalarField) -> Result<Self> {
        if !f.depends_only_on(&[Var::S]) {
            return Err(Error::Input(format!("initial data '{}' may only use the variable s", f.source())));
        }
        Ok(Self::Expr(f))
    }

    pub fn eval<T: Scalar>(&self, s: T) -> Result<T, EvalError> {
        match self {
            DataFn::Expr(f) => f.eval_sigma(s),
            DataFn::Spline(sp) => sp.eval(s),
        }
    }

    /// Value and first derivative.
    pub fn jet<T: Scalar>(&self, s: T) -> Result<(T, T), EvalError> {
        let d = self.eval(Dual::var(s))?;
        Ok((d.re, d.eps))
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            DataFn::Expr(_) => (f64::NEG_INFINITY, f64::INFINITY),
            DataFn::Spline(sp) => sp.support(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DataFn::Expr(f) => f.source().to_string(),
            DataFn::Spline(sp) => {
                let (a, b) = sp.support();
                format!("spline on [{a}, {b}] with {} knots", sp.knots().len())
            }
        }
    }
}

/// `u₀¹..u₀ⁿ`; absent entries are not used by the family.
#[derive(Clone, Debug, Default)]
pub struct InitialData {
    fields: Vec<Option<DataFn>>,
}

impl InitialData {
    pub fn new(n: usize) -> Self {
        Self { fields: vec![None; n] }
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn set(&mut self, i: usize, f: DataFn) {
        self.fields[i] = Some(f);
    }

    pub fn with(mut self, i: usize, f: DataFn) -> Self {
        self.set(i, f);
        self
    }

    pub fn has(&self, i: usize) -> bool {
        self.fields.get(i).is_some_and(|f| f.is_some())
    }

    /// `u₀^{i+1}`.
    pub fn get(&self, i: usize) -> Result<&DataFn, EvalError> {
        self.fields
            .get(i)
            .and_then(|f| f.as_ref())
            .ok_or_else(|| EvalError::Singular(format!("initial datum u0{} is not set", i + 1)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &DataFn)> {
        self.fields.iter().enumerate().filter_map(|(i, f)| f.as_ref().map(|f| (i, f)))
    }

    /// Intersection of the supports of all present functions.
    pub fn support(&self) -> (f64, f64) {
        self.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), (_, f)| {
            let (a, b) = f.support();
            (lo.max(a), hi.min(b))
        })
    }

    /// Parsed data from `(index, expression in s)` pairs.
    pub fn from_exprs(n: usize, exprs: &[(usize, &str)], constants: &BTreeMap<String, f64>) -> Result<Self> {
        let mut d = Self::new(n);
        for &(i, src) in exprs {
            if i >= n {
                return Err(Error::Input(format!("initial datum u0{} exceeds n = {n}", i + 1)));
            }
            d.set(i, DataFn::expr(ScalarField::from_source(src, 0, constants)?)?);
        }
        Ok(d)
    }
}
