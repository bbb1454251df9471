use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::data::InitialData;
use crate::constraints::hardrod::{case_triple, hardrod_phi, HardRodCase};
use crate::constraints::{shared, ConstraintSpec};
use crate::error::{Error, EvalError, Result};
use crate::fieldfn::{Dual, Field, GenericField, Scalar, ScalarField, Var};
use crate::systems::{catalog, JordanSystem};

/// The five exact-solution families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "canonical2")]
    Canonical2,
    #[serde(rename = "wdvv-t")]
    WdvvT,
    #[serde(rename = "wdvv-s")]
    WdvvS,
    #[serde(rename = "hardrod1")]
    HardRod1,
    #[serde(rename = "hardrod2")]
    HardRod2,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] =
        [FamilyKind::Canonical2, FamilyKind::WdvvT, FamilyKind::WdvvS, FamilyKind::HardRod1, FamilyKind::HardRod2];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Canonical2 => "canonical2",
            FamilyKind::WdvvT => "wdvv-t",
            FamilyKind::WdvvS => "wdvv-s",
            FamilyKind::HardRod1 => "hardrod1",
            FamilyKind::HardRod2 => "hardrod2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Number of field components.
    pub fn n(self) -> usize {
        match self {
            FamilyKind::Canonical2 => 2,
            FamilyKind::WdvvT | FamilyKind::WdvvS => 3,
            FamilyKind::HardRod1 | FamilyKind::HardRod2 => 4,
        }
    }

    /// Initial-data slots the formulas read.
    pub fn data_slots(self) -> &'static [usize] {
        match self {
            FamilyKind::Canonical2 => &[0, 1],
            FamilyKind::WdvvT | FamilyKind::WdvvS => &[0, 1, 2],
            FamilyKind::HardRod1 => &[0, 1, 3],
            FamilyKind::HardRod2 => &[0, 1, 2, 3],
        }
    }

    /// Formulas whose printed and re-derived forms differ.
    pub fn printed_differences(self) -> &'static [&'static str] {
        match self {
            FamilyKind::WdvvT => &[
                "u1 = log((f1'/2) u03' t^2 - u02' t + 1) + u01 (re-derived: u01 times the same bracket)",
                "closure f1(u03) = u03'/u01 (re-derived: u01 u03')",
            ],
            FamilyKind::HardRod1 => &[
                "characteristic x = t (k t u02 + h u02 + a u04)/(h + a - k t) + s (re-derived: -k t u02)",
                "closure u02' = c1 (a + k1)/(h u01 - a^2) with k1 read as u01 (re-derived: k1 = h)",
            ],
            _ => &[],
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which set of closed-form formulas to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Paper,
    Rederived,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Paper => "paper",
            Variant::Rederived => "rederived",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Family parameters: numbers `a`, `k`, `h` and the functions `f¹`, `c₁`.
#[derive(Clone, Debug, Default)]
pub struct Params {
    pub numbers: BTreeMap<String, f64>,
    /// `f¹(u²)` for Canonical2, `f¹(u³)` for the WDVV families.
    pub f1: Option<ScalarField>,
    /// `c₁(u²)` for the hard-rod families.
    pub c1: Option<ScalarField>,
}

impl Params {
    pub fn number(&self, name: &str) -> Option<f64> {
        self.numbers.get(name).copied()
    }

    fn require(&self, kind: FamilyKind, name: &str) -> Result<f64> {
        self.number(name)
            .ok_or_else(|| Error::Input(format!("family {kind} needs the numeric parameter '{name}'")))
    }
}

#[derive(Clone, Debug)]
struct Resolved {
    a: f64,
    k: f64,
    h: f64,
}

/// A fully specified solution family: parameters, complete data and variant.
#[derive(Clone, Debug)]
pub struct FamilyConfig {
    kind: FamilyKind,
    variant: Variant,
    params: Params,
    data: InitialData,
    r: Resolved,
    sys: JordanSystem,
}

const TINY: f64 = 1e-14;

fn nonzero<T: Scalar>(v: T, what: &str) -> Result<T, EvalError> {
    if v.re().abs() < TINY || !v.re().is_finite() {
        return Err(EvalError::Singular(format!("{what} vanishes")));
    }
    Ok(v)
}

fn log_pos<T: Scalar>(v: T, what: &str) -> Result<T, EvalError> {
    if !(v.re() > 0.0) || !v.re().is_finite() {
        return Err(EvalError::Singular(format!("{what} is not positive")));
    }
    Ok(v.ln())
}

fn expect_field(f: &ScalarField, arity: usize, var: usize, what: &str) -> Result<ScalarField> {
    let f = if GenericField::arity(f) == arity {
        f.clone()
    } else {
        f.with_arity(arity).map_err(|e| Error::Parse { src: f.source().into(), source: e })?
    };
    if !f.depends_only_on(&[Var::U(var)]) {
        return Err(Error::Input(format!("{what} = '{}' must depend on u{} only", f.source(), var + 1)));
    }
    Ok(f)
}

impl FamilyConfig {
    pub fn new(kind: FamilyKind, variant: Variant, mut params: Params, data: InitialData) -> Result<Self> {
        if data.n() != kind.n() {
            return Err(Error::Input(format!("family {kind} has {} components, data has {}", kind.n(), data.n())));
        }
        for &i in kind.data_slots() {
            if !data.has(i) {
                return Err(Error::Input(format!("family {kind} needs initial datum u0{}", i + 1)));
            }
        }
        let mut r = Resolved { a: 0.0, k: 0.0, h: 0.0 };
        match kind {
            FamilyKind::Canonical2 => {
                let f1 = params.f1.as_ref().ok_or_else(|| Error::Input("canonical2 needs f1(u2)".into()))?;
                params.f1 = Some(expect_field(f1, 2, 1, "f1")?);
            }
            FamilyKind::WdvvT | FamilyKind::WdvvS => {
                if let Some(f1) = &params.f1 {
                    params.f1 = Some(expect_field(f1, 3, 2, "f1")?);
                }
            }
            FamilyKind::HardRod1 | FamilyKind::HardRod2 => {
                r.a = params.require(kind, "a")?;
                r.k = params.require(kind, "k")?;
                let c1 = params.c1.as_ref().ok_or_else(|| Error::Input(format!("{kind} needs c1(u2)")))?;
                params.c1 = Some(expect_field(c1, 4, 1, "c1")?);
                if kind == FamilyKind::HardRod1 {
                    r.h = params.require(kind, "h")?;
                } else if r.k == 0.0 {
                    return Err(Error::Input("hardrod2 needs k != 0".into()));
                }
            }
        }
        let sys = match kind {
            FamilyKind::Canonical2 => catalog::canonical(),
            FamilyKind::WdvvT => catalog::wdvv_t(),
            FamilyKind::WdvvS => catalog::wdvv_s(),
            FamilyKind::HardRod1 | FamilyKind::HardRod2 => catalog::hard_rod(r.a)?,
        };
        Ok(Self { kind, variant, params, data, r, sys })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn data(&self) -> &InitialData {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.kind.n()
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self { variant, ..self.clone() }
    }

    /// The σ interval on which every datum is defined.
    pub fn support(&self) -> (f64, f64) {
        self.data.support()
    }

    fn u0<T: Scalar>(&self, i: usize, s: T) -> Result<T, EvalError> {
        self.data.get(i)?.eval(s)
    }

    fn u0_jet<T: Scalar>(&self, i: usize, s: T) -> Result<(T, T), EvalError> {
        self.data.get(i)?.jet(s)
    }

    fn c1_jet<T: Scalar>(&self, v: T) -> Result<(T, T), EvalError> {
        let c = self.params.c1.as_ref().expect("validated").eval_slot(1, Dual::var(v))?;
        Ok((c.re, c.eps))
    }

    /// `f¹(u₀³(σ))` for the WDVV families.
    pub fn wdvv_f<T: Scalar>(&self, s: T) -> Result<T, EvalError> {
        if let Some(f1) = &self.params.f1 {
            return f1.eval_slot(2, self.u0(2, s)?);
        }
        let (_, c3p) = self.u0_jet(2, s)?;
        let a1 = self.u0(0, s)?;
        match (self.kind, self.variant) {
            (FamilyKind::WdvvT, Variant::Rederived) => Ok(a1 * c3p),
            (FamilyKind::WdvvT, Variant::Paper) => Ok(c3p / nonzero(a1, "u01")?),
            (FamilyKind::WdvvS, _) => Ok(a1 * c3p / nonzero(self.u0(1, s)?, "u02")?),
            _ => unreachable!("only the WDVV families use f1(u03)"),
        }
    }

    fn wdvv_f_jet<T: Scalar>(&self, s: T) -> Result<(T, T), EvalError> {
        let d = self.wdvv_f(Dual::var(s))?;
        Ok((d.re, d.eps))
    }

    /// `X(σ, t)` with the characteristic relation `x = X(σ, t)`.
    pub fn char_x<T: Scalar>(&self, s: T, t: T) -> Result<T, EvalError> {
        let Resolved { a, k, h } = self.r;
        let (a, k, h) = (T::cst(a), T::cst(k), T::cst(h));
        match self.kind {
            FamilyKind::Canonical2 => Ok(s - self.u0(1, s)? * t),
            FamilyKind::WdvvT => Ok(s - self.u0(1, s)? * t + self.wdvv_f(s)? * t * t.scale(0.5)),
            FamilyKind::WdvvS => {
                let b = self.u0(1, s)?;
                let d = nonzero(T::cst(1.0) - self.wdvv_f(s)? * b * t, "1 - f1 u02 t")?;
                Ok(s + b * b * t / d.scale(2.0))
            }
            FamilyKind::HardRod1 => {
                let (b, w) = (self.u0(1, s)?, self.u0(3, s)?);
                let den = nonzero(h + a - k * t, "h + a - k t")?;
                let ktb = match self.variant {
                    Variant::Rederived => -(k * t * b),
                    Variant::Paper => k * t * b,
                };
                Ok(s + t * (h * b + ktb + a * w) / den)
            }
            FamilyKind::HardRod2 => {
                let (b, v3, w) = (self.u0(1, s)?, self.u0(2, s)?, self.u0(3, s)?);
                let (c, _) = self.c1_jet(b)?;
                let d0 = b - w;
                let v0 = v3 + a;
                let num = v0 * (T::cst(1.0) + c * d0 * t);
                let den = nonzero(v0 + (c * v0 + k) * d0 * t, "characteristic log denominator")?;
                Ok(s + b * t + a / k * log_pos(num / den, "characteristic log argument")?)
            }
        }
    }

    /// The closed-form fields at characteristic label `σ` and time `t`.
    pub fn fields_at<T: Scalar>(&self, s: T, t: T) -> Result<Vec<T>, EvalError> {
        let Resolved { a, k, h } = self.r;
        let (a, k, h) = (T::cst(a), T::cst(k), T::cst(h));
        let one = T::cst(1.0);
        let v = match self.kind {
            FamilyKind::Canonical2 => {
                let (a1, b) = (self.u0(0, s)?, self.u0(1, s)?);
                let f = self.params.f1.as_ref().expect("validated").eval_slot(1, b)?;
                let arg = (-a1).exp() - f * t;
                vec![-log_pos(arg, "exp(-u01) - f1 t")?, b]
            }
            FamilyKind::WdvvT => {
                let (a1, c3) = (self.u0(0, s)?, self.u0(2, s)?);
                let (b, bp) = self.u0_jet(1, s)?;
                let (f, fp) = self.wdvv_f_jet(s)?;
                let xs = one - bp * t + fp * t * t.scale(0.5);
                let u1 = match self.variant {
                    Variant::Rederived => a1 * xs,
                    Variant::Paper => log_pos(xs, "log argument of u1")? + a1,
                };
                vec![u1, b - f * t, c3]
            }
            FamilyKind::WdvvS => {
                let (a1, c3) = (self.u0(0, s)?, self.u0(2, s)?);
                let (b, bp) = self.u0_jet(1, s)?;
                let (f, fp) = self.wdvv_f_jet(s)?;
                let d = nonzero(one - f * b * t, "1 - f1 u02 t")?;
                let u1 = match self.variant {
                    Variant::Rederived => {
                        let xs = one + t * (b * bp.scale(2.0) - f * b * b * bp * t + fp * b * b * b * t) / (d * d).scale(2.0);
                        a1 * xs / d
                    }
                    Variant::Paper => {
                        let (_, c3p) = self.u0_jet(2, s)?;
                        let m = -one + f * b * t;
                        let corr = b * b * f * t * (bp.scale(2.0) + t * b * (fp * b - f * bp))
                            / (nonzero(c3p, "u03'")?.scale(2.0) * m * m);
                        (a1 + corr) / d
                    }
                };
                vec![u1, b / d, c3]
            }
            FamilyKind::HardRod1 => {
                let (a1, b, w) = (self.u0(0, s)?, self.u0(1, s)?, self.u0(3, s)?);
                let (c, _) = self.c1_jet(b)?;
                let den = nonzero(h + a - k * t, "h + a - k t")?;
                vec![a1 + c * t, b, h - k * t, ((h + a) * w - k * t * b) / den]
            }
            FamilyKind::HardRod2 => {
                let (a1, b, v3, w) = (self.u0(0, s)?, self.u0(1, s)?, self.u0(2, s)?, self.u0(3, s)?);
                let (c, cp) = self.c1_jet(b)?;
                let d0 = b - w;
                let den1 = nonzero(c + cp * d0, "c1 + (u02 - u04) c1'")?;
                let den4 = nonzero(c * d0 * t + one, "c1 (u02 - u04) t + 1")?;
                vec![
                    a1 + (a1 + a) * c * c * d0 * t / den1,
                    b,
                    v3 + d0 * (c * (v3 + a) + k) * t,
                    (w + b * c * d0 * t) / den4,
                ]
            }
        };
        if v.iter().any(|x| !x.re().is_finite()) {
            return Err(EvalError::Singular("non-finite field value".into()));
        }
        Ok(v)
    }

    /// `∂x/∂σ` at fixed `t`; NaN where the relation cannot be evaluated.
    pub fn jacobian_x_sigma(&self, s: f64, t: f64) -> f64 {
        self.char_x(Dual::var(s), Dual::constant(t)).map(|d| d.eps).unwrap_or(f64::NAN)
    }

    pub fn system(&self) -> &JordanSystem {
        &self.sys
    }

    /// The differential constraints the family is built to satisfy.
    pub fn constraints(&self) -> Result<ConstraintSpec> {
        let sys = self.system();
        match self.kind {
            FamilyKind::Canonical2 => {
                let f1 = self.params.f1.clone().expect("validated");
                ConstraintSpec::per_block(sys, vec![shared(CanonicalPhi { f1 })])
            }
            FamilyKind::WdvvT | FamilyKind::WdvvS => {
                ConstraintSpec::per_block(sys, vec![shared(WdvvPhi { fc: Arc::new(self.clone()) })])
            }
            FamilyKind::HardRod1 | FamilyKind::HardRod2 => {
                let case = if self.kind == FamilyKind::HardRod1 { HardRodCase::One } else { HardRodCase::Two };
                let f = case_triple(case, self.params.c1.as_ref().expect("validated"), self.r.k, self.r.a)?;
                hardrod_phi(&f, sys)
            }
        }
    }

    /// Solve `u₀³(σ) = v` for σ by safeguarded Newton on the data support.
    fn invert_u03(&self, v: f64) -> Result<f64, EvalError> {
        let d = self.data.get(2)?;
        let (lo, hi) = d.support();
        let mut s = v.clamp(lo, hi);
        for _ in 0..100 {
            let (g, gp) = d.jet(s)?;
            let r = g - v;
            if r.abs() < 1e-14 * v.abs().max(1.0) {
                return Ok(s);
            }
            if gp.abs() < TINY {
                break;
            }
            s = (s - r / gp).clamp(lo, hi);
        }
        Err(EvalError::Singular(format!("cannot invert u03 at u3 = {v}")))
    }
}

/// `f¹(u²) e^{u¹}`.
#[derive(Clone, Debug)]
struct CanonicalPhi {
    f1: ScalarField,
}

impl GenericField for CanonicalPhi {
    fn arity(&self) -> usize {
        2
    }
    fn eval_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<T, EvalError> {
        Ok(self.f1.eval_at(t, x, u)? * u[0].exp())
    }
}

/// `f¹(u³)/u¹` or `(u²/u¹) f¹(u³)` with `f¹` recovered from the data.
#[derive(Clone, Debug)]
struct WdvvPhi {
    fc: Arc<FamilyConfig>,
}

impl GenericField for WdvvPhi {
    fn arity(&self) -> usize {
        3
    }

    fn eval_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<T, EvalError> {
        let fc = &self.fc;
        let f = match &fc.params.f1 {
            Some(f1) => f1.eval_at(t, x, u)?,
            None => {
                let s0 = fc.invert_u03(u[2].re())?;
                let (g, gp) = fc.data.get(2)?.jet(s0)?;
                // one Newton step in T carries the derivative of the inverse
                let s = T::cst(s0) + (u[2] - T::cst(g)).scale(1.0 / gp);
                fc.wdvv_f(s)?
            }
        };
        let u1 = nonzero(u[0], "u1")?;
        Ok(match fc.kind {
            FamilyKind::WdvvT => f / u1,
            _ => u[1] / u1 * f,
        })
    }
}

/// The constraint field as a shared object.
pub fn constraint_field(fc: &FamilyConfig, i: usize) -> Result<Arc<dyn Field>> {
    Ok(fc.constraints()?.items()[i].field.clone())
}
