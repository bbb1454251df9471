//! Constraints of the four-component hard-rod reduction.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{parse_fields, ConstraintSpec};
use crate::error::{Error, EvalError, Result};
use crate::fieldfn::{Dual, Field, GenericField, Point, Scalar, ScalarField, Var};
use crate::systems::JordanSystem;

/// Guard for the coalescence loci `λ² = λ¹` and `u² = u⁴`.
pub const SINGULAR_TOL: f64 = 1e-10;

/// `f / (λ² − λ¹)`.
#[derive(Clone, Debug)]
pub struct HardRodPhi {
    num: Arc<dyn Field>,
    lam1: ScalarField,
    lam2: ScalarField,
}

impl std::fmt::Debug for dyn Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<field of arity {}>", self.arity())
    }
}

impl Field for HardRodPhi {
    fn arity(&self) -> usize {
        4
    }

    fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        let d = Field::eval(&self.lam2, p)? - Field::eval(&self.lam1, p)?;
        if d.abs() < SINGULAR_TOL {
            return Err(EvalError::Singular("coalescing speeds lambda2 = lambda1".into()));
        }
        Ok(self.num.eval(p)? / d)
    }

    fn grad(&self, p: &Point) -> Result<crate::fieldfn::Gradient, EvalError> {
        let d = Field::eval(&self.lam2, p)? - Field::eval(&self.lam1, p)?;
        if d.abs() < SINGULAR_TOL {
            return Err(EvalError::Singular("coalescing speeds lambda2 = lambda1".into()));
        }
        let v = self.num.eval(p)?;
        let gn = self.num.grad(p)?;
        let g1 = Field::grad(&self.lam1, p)?;
        let g2 = Field::grad(&self.lam2, p)?;
        let q = |n: f64, a: f64, b: f64| (n * d - v * (b - a)) / (d * d);
        Ok(crate::fieldfn::Gradient {
            dt: q(gn.dt, g1.dt, g2.dt),
            dx: q(gn.dx, g1.dx, g2.dx),
            du: (0..4).map(|i| q(gn.du[i], g1.du[i], g2.du[i])).collect(),
        })
    }
}

fn check_hard_rod(sys: &JordanSystem) -> Result<()> {
    if sys.n() != 4 || sys.blocks().len() != 2 || sys.blocks().iter().any(|b| b.size() != 2) {
        return Err(Error::Precondition("expected the 2+2 block hard-rod system".into()));
    }
    Ok(())
}

/// `φ^i = f^i/(λ² − λ¹)`: constraints on `u²`, `u⁴` and `u³` in that order.
pub fn hardrod_phi(f: &[Arc<dyn Field>; 3], sys: &JordanSystem) -> Result<ConstraintSpec> {
    check_hard_rod(sys)?;
    let lam1 = sys.blocks()[0].eigenvalue().clone();
    let lam2 = sys.blocks()[1].eigenvalue().clone();
    let mk = |num: &Arc<dyn Field>| -> Arc<dyn Field> {
        Arc::new(HardRodPhi { num: num.clone(), lam1: lam1.clone(), lam2: lam2.clone() })
    };
    Ok(ConstraintSpec::per_block(sys, vec![mk(&f[0]), mk(&f[1])])?.with_extra(2, mk(&f[2]), "phi3"))
}

pub fn parse_f_triple(srcs: &[String], params: &BTreeMap<String, f64>) -> Result<[Arc<dyn Field>; 3]> {
    if srcs.len() != 3 {
        return Err(Error::Input(format!("hardrod_f needs three expressions, got {}", srcs.len())));
    }
    let v = parse_fields(srcs, 4, params)?;
    let mut it = v.into_iter().map(|f| Arc::new(f) as Arc<dyn Field>);
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

/// Which integrated solution of the f-level conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HardRodCase {
    /// `f¹ = c₁(u²)(u²−u⁴)/(u¹+a)`, `f² = −k(u²−u⁴)/(u³+a)`, `f³ = 0`.
    One,
    /// `f¹ = c₁²(u²−u⁴)²/(c₁ + (u²−u⁴)c₁')`, `f² = (u²−u⁴)²c₁`, `f³ = (u²−u⁴)k`.
    Two,
}

/// Component `index` (0..3) of a case triple with `c₁` a function of `u²`.
#[derive(Clone, Debug)]
pub struct CaseF {
    case: HardRodCase,
    index: usize,
    c1: ScalarField,
    k: f64,
    a: f64,
}

impl GenericField for CaseF {
    fn arity(&self) -> usize {
        4
    }

    fn eval_at<T: Scalar>(&self, _t: T, _x: T, u: &[T]) -> Result<T, EvalError> {
        let a = T::cst(self.a);
        let k = T::cst(self.k);
        let d = u[1] - u[3];
        let cj = self.c1.eval_slot(1, Dual::var(u[1]))?;
        let (c, cp) = (cj.re, cj.eps);
        let v = match (self.case, self.index) {
            (HardRodCase::One, 0) => c * d / (u[0] + a),
            (HardRodCase::One, 1) => -(k * d) / (u[2] + a),
            (HardRodCase::One, _) => T::cst(0.0),
            (HardRodCase::Two, 0) => {
                let den = c + d * cp;
                if den.re().abs() < SINGULAR_TOL {
                    return Err(EvalError::Singular("c1 + (u2 - u4) c1' vanishes".into()));
                }
                c * c * d * d / den
            }
            (HardRodCase::Two, 1) => d * d * c,
            (HardRodCase::Two, _) => d * k,
        };
        Ok(v)
    }
}

/// The triple `(f¹, f², f³)` for `case`.
pub fn case_triple(case: HardRodCase, c1: &ScalarField, k: f64, a: f64) -> Result<[Arc<dyn Field>; 3]> {
    if !c1.depends_only_on(&[Var::U(1)]) {
        return Err(Error::Input(format!("c1 = '{}' must depend on u2 only", c1.source())));
    }
    let c1 = if GenericField::arity(c1) == 4 {
        c1.clone()
    } else {
        c1.with_arity(4).map_err(|e| Error::Parse { src: c1.source().into(), source: e })?
    };
    let mk = |index| -> Arc<dyn Field> { Arc::new(CaseF { case, index, c1: c1.clone(), k, a }) };
    Ok([mk(0), mk(1), mk(2)])
}

struct FData {
    v: [f64; 3],
    du: [Vec<f64>; 3],
}

fn f_data(f: [&dyn Field; 3], p: &Point) -> Result<FData> {
    if p.u.len() != 4 {
        return Err(EvalError::Arity { expected: 4, got: p.u.len() }.into());
    }
    let d = p.u[1] - p.u[3];
    if d.abs() < SINGULAR_TOL {
        return Err(EvalError::Singular("u2 = u4".into()).into());
    }
    Ok(FData {
        v: [f[0].eval(p)?, f[1].eval(p)?, f[2].eval(p)?],
        du: [f[0].grad(p)?.du, f[1].grad(p)?.du, f[2].grad(p)?.du],
    })
}

fn f_residual(f: [&dyn Field; 3], p: &Point, a: f64, sign_b: f64) -> Result<[f64; 3]> {
    let FData { v: [f1, f2, f3], du: [g1, g2, g3] } = f_data(f, p)?;
    let u = &p.u;
    let d = u[1] - u[3];
    let r1 = (u[0] + a) * g1[0] * f1 + f1 * f1 + d * g1[3] * f2 + f1 * f2;
    let r2 = (u[2] + a) * g2[2] * f2 + f2 * f2 - d * g2[1] * f1 + sign_b * f2 * f1;
    let bracket = d * g2[1] * f1 - f2 * f1 + d * g2[3] * f2 + f2 * f2;
    let r3 = (u[2] + a) * (f2 * g3[2] - f3 * g2[2]) - d * g3[1] * f1 + f3 * f1 - (u[2] + a) / d * bracket;
    Ok([r1, r2, r3])
}

/// Left-hand sides of the three f-level compatibility conditions.
pub fn hardrod_f_residual(f: [&dyn Field; 3], p: &Point, a: f64) -> Result<[f64; 3]> {
    f_residual(f, p, a, 1.0)
}

/// As [`hardrod_f_residual`] with the second condition's last term negated.
pub fn hardrod_f_residual_printed(f: [&dyn Field; 3], p: &Point, a: f64) -> Result<[f64; 3]> {
    f_residual(f, p, a, -1.0)
}
