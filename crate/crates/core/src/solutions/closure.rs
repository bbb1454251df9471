use super::data::{DataFn, InitialData};
use super::family::{FamilyConfig, FamilyKind, Params, Variant};
use super::ode::rk4_tabulate;
use super::spline::CubicSpline;
use crate::error::{Error, EvalError, Result};
use crate::fieldfn::Dual;

const RHS_SINGULAR: f64 = 1e-10;

/// What the closure ODE should tabulate.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureSpec {
    /// Zero-based data slots to produce.
    pub produce: Vec<usize>,
    pub sigma_range: (f64, f64),
    pub step: f64,
    /// Label at which the anchor values are given.
    pub anchor: f64,
    /// `(slot, value)` at the anchor, one per produced slot.
    pub anchors: Vec<(usize, f64)>,
}

/// Residual of each defining ODE on the knots.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureReport {
    pub residuals: Vec<(usize, f64)>,
    pub knots: usize,
}

impl ClosureReport {
    pub fn max(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, (_, r)| m.max(*r))
    }
}

/// Slots fixed by the closure relations rather than chosen freely.
pub fn produced_slots(kind: FamilyKind) -> &'static [usize] {
    match kind {
        FamilyKind::Canonical2 => &[1],
        FamilyKind::WdvvT | FamilyKind::WdvvS => &[],
        FamilyKind::HardRod1 => &[1, 3],
        FamilyKind::HardRod2 => &[1, 2, 3],
    }
}

fn guard(v: f64, what: &str, s: f64) -> Result<f64> {
    if v.abs() < RHS_SINGULAR || !v.is_finite() {
        return Err(Error::Ode(format!("right-hand side singular at s = {s}: {what} = {v:e}")));
    }
    Ok(v)
}

struct Rhs<'a> {
    kind: FamilyKind,
    variant: Variant,
    params: &'a Params,
    u01: &'a DataFn,
    a: f64,
    k: f64,
    h: f64,
}

impl Rhs<'_> {
    fn c1(&self, v: f64) -> Result<(f64, f64)> {
        let d = self.params.c1.as_ref().expect("validated").eval_slot(1, Dual::var(v))?;
        Ok((d.re, d.eps))
    }

    fn eval(&self, s: f64, y: &[f64]) -> Result<Vec<f64>> {
        let u1 = self.u01.eval(s)?;
        let (a, k, h) = (self.a, self.k, self.h);
        match self.kind {
            FamilyKind::Canonical2 => {
                let f = self.params.f1.as_ref().expect("validated").eval_slot(1, y[0])?;
                Ok(vec![f * u1.exp()])
            }
            FamilyKind::HardRod1 => {
                let p = guard(h * u1 - a * a, "h u01 - a^2", s)?;
                let (c, _) = self.c1(y[0])?;
                let k1 = match self.variant {
                    Variant::Rederived => h,
                    Variant::Paper => u1,
                };
                Ok(vec![c * (a + k1) / p, -k * (u1 + a) / p])
            }
            FamilyKind::HardRod2 => {
                let (u2, u3, u4) = (y[0], y[1], y[2]);
                let p = guard(u1 * u3 - a * a, "u01 u03 - a^2", s)?;
                let (c, cp) = self.c1(u2)?;
                let d = u2 - u4;
                let den = guard(c + cp * d, "c1 + (u02 - u04) c1'", s)?;
                let m = (u1 + a) * (u3 + a) / p;
                Ok(vec![c * c * m * d / den, k * m, c * m * d])
            }
            FamilyKind::WdvvT | FamilyKind::WdvvS => Ok(vec![]),
        }
    }
}

fn march(from: f64, to: f64, step: f64) -> Vec<f64> {
    let mut v = vec![from];
    let dir = (to - from).signum();
    let n = ((to - from).abs() / step - 1e-9).ceil().max(0.0) as usize;
    for i in 1..=n {
        let s = from + dir * step * i as f64;
        v.push(if i == n { to } else { s });
    }
    v
}

/// Complete `free` data by integrating the family's closure ODEs.
pub fn close_initial_data(
    kind: FamilyKind,
    variant: Variant,
    params: Params,
    free: InitialData,
    spec: &ClosureSpec,
) -> Result<(FamilyConfig, ClosureReport)> {
    let produce = produced_slots(kind);
    let mut requested = spec.produce.clone();
    requested.sort_unstable();
    if requested != produce {
        let names: Vec<String> = produce.iter().map(|i| format!("u0{}", i + 1)).collect();
        return Err(Error::Input(format!("family {kind} closes exactly [{}]", names.join(", "))));
    }
    for &i in kind.data_slots() {
        let is_produced = produce.contains(&i);
        if free.has(i) == is_produced {
            let why = if is_produced { "is produced by the closure and must not be given" } else { "must be given" };
            return Err(Error::Input(format!("initial datum u0{} {why}", i + 1)));
        }
    }
    if produce.is_empty() {
        let fc = FamilyConfig::new(kind, variant, params, free)?;
        return Ok((fc, ClosureReport { residuals: vec![], knots: 0 }));
    }
    let (s0, s1) = spec.sigma_range;
    if !(s0 < s1) || !(spec.step > 0.0) || !spec.step.is_finite() {
        return Err(Error::Input("closure needs sigma_range [a, b] with a < b and step > 0".into()));
    }
    if !(spec.anchor >= s0 && spec.anchor <= s1) {
        return Err(Error::Input(format!("anchor s = {} lies outside [{s0}, {s1}]", spec.anchor)));
    }
    let mut y0 = Vec::with_capacity(produce.len());
    for &i in produce {
        let v = spec
            .anchors
            .iter()
            .find(|(j, _)| *j == i)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Input(format!("closure needs an anchor value for u0{}", i + 1)))?;
        y0.push(v);
    }

    // validate parameters before integrating
    let mut probe = free.clone();
    for &i in produce {
        probe.set(i, DataFn::Expr(crate::fieldfn::ScalarField::constant(0.0, 0)));
    }
    let checked = FamilyConfig::new(kind, variant, params.clone(), probe)?;
    let num = |name: &str| checked.params().number(name).unwrap_or(0.0);
    let rhs = Rhs {
        kind,
        variant,
        params: checked.params(),
        u01: checked.data().get(0)?,
        a: num("a"),
        k: num("k"),
        h: num("h"),
    };
    let f = |s: f64, y: &[f64]| rhs.eval(s, y);

    let fwd = march(spec.anchor, s1, spec.step);
    let bwd = march(spec.anchor, s0, spec.step);
    let yf = rk4_tabulate(f, &y0, &fwd)?;
    let yb = rk4_tabulate(f, &y0, &bwd)?;
    let knots: Vec<f64> = bwd.iter().rev().chain(fwd.iter().skip(1)).copied().collect();
    let table: Vec<&Vec<f64>> = yb.iter().rev().chain(yf.iter().skip(1)).collect();
    if knots.len() < 4 {
        return Err(Error::Input("closure grid needs at least 4 knots; reduce the step".into()));
    }

    let mut data = free;
    let mut splines = Vec::new();
    for (j, &i) in produce.iter().enumerate() {
        let values: Vec<f64> = table.iter().map(|y| y[j]).collect();
        let sp = CubicSpline::new(knots.clone(), values)?;
        data.set(i, DataFn::Spline(sp.clone()));
        splines.push(sp);
    }

    let mut residuals = vec![0.0; produce.len()];
    for &s in &knots {
        let mut y = Vec::with_capacity(produce.len());
        let mut dy = Vec::with_capacity(produce.len());
        for sp in &splines {
            let d = sp.eval(Dual::var(s)).map_err(|e: EvalError| Error::Eval(e))?;
            y.push(d.re);
            dy.push(d.eps);
        }
        let r = rhs.eval(s, &y)?;
        for j in 0..produce.len() {
            residuals[j] = f64::max(residuals[j], (dy[j] - r[j]).abs());
        }
    }
    let report = ClosureReport { residuals: produce.iter().copied().zip(residuals).collect(), knots: knots.len() };
    let fc = FamilyConfig::new(kind, variant, params, data)?;
    Ok((fc, report))
}
