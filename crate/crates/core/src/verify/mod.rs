//! Finite-difference oracle for candidate solutions.

use serde::{Deserialize, Serialize};

use crate::constraints::ConstraintSpec;
use crate::error::{Error, Result, SolveError};
use crate::fieldfn::Point;
use crate::solutions::{FamilyConfig, FamilyKind, GridSpec, Variant};
use crate::systems::JordanSystem;

/// Residuals below this are indistinguishable from rounding.
pub const FLOOR: f64 = 1e-13;
pub const MIN_ORDER: f64 = 1.9;
pub const MIN_EVALUABLE: f64 = 0.8;
pub const DEFAULT_LADDER: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

/// Anything that yields `u(x, t)`.
pub trait FieldSampler {
    fn n(&self) -> usize;
    fn sample(&self, x: f64, t: f64) -> Result<Vec<f64>, SolveError>;
    fn tag(&self) -> String;
}

impl FieldSampler for FamilyConfig {
    fn n(&self) -> usize {
        FamilyConfig::n(self)
    }
    fn sample(&self, x: f64, t: f64) -> Result<Vec<f64>, SolveError> {
        self.eval_solution(x, t)
    }
    fn tag(&self) -> String {
        format!("{}/{}", self.kind(), self.variant())
    }
}

/// A sampler backed by a closure.
pub struct FnSampler<F> {
    n: usize,
    tag: String,
    f: F,
}

impl<F> FnSampler<F>
where
    F: Fn(f64, f64) -> Vec<f64>,
{
    pub fn new(n: usize, tag: &str, f: F) -> Self {
        Self { n, tag: tag.into(), f }
    }
}

impl<F> FieldSampler for FnSampler<F>
where
    F: Fn(f64, f64) -> Vec<f64>,
{
    fn n(&self) -> usize {
        self.n
    }
    fn sample(&self, x: f64, t: f64) -> Result<Vec<f64>, SolveError> {
        Ok((self.f)(x, t))
    }
    fn tag(&self) -> String {
        self.tag.clone()
    }
}

struct Stencil {
    c: Vec<f64>,
    xp: Vec<f64>,
    xm: Vec<f64>,
    tp: Vec<f64>,
    tm: Vec<f64>,
}

fn stencil(s: &dyn FieldSampler, x: f64, t: f64, h: f64) -> Result<Stencil> {
    Ok(Stencil {
        c: s.sample(x, t)?,
        xp: s.sample(x + h, t)?,
        xm: s.sample(x - h, t)?,
        tp: s.sample(x, t + h)?,
        tm: s.sample(x, t - h)?,
    })
}

/// `(u_t − A(u) u_x)` by centred differences on the 5-point cross.
pub fn pde_residual(sys: &JordanSystem, s: &dyn FieldSampler, x: f64, t: f64, h: f64) -> Result<Vec<f64>> {
    if s.n() != sys.n() {
        return Err(Error::Input(format!("sampler has {} components, system has {}", s.n(), sys.n())));
    }
    let st = stencil(s, x, t, h)?;
    let a = sys.assemble(&Point::new(t, x, st.c.clone()))?;
    let n = sys.n();
    Ok((0..n)
        .map(|i| {
            let mut r = (st.tp[i] - st.tm[i]) / (2.0 * h);
            for j in 0..n {
                r -= a[(i, j)] * (st.xp[j] - st.xm[j]) / (2.0 * h);
            }
            r
        })
        .collect())
}

/// `∂_x u^{target} − φ(t, x, u)` for every constraint.
pub fn constraint_residual(c: &ConstraintSpec, s: &dyn FieldSampler, x: f64, t: f64, h: f64) -> Result<Vec<f64>> {
    let u = s.sample(x, t)?;
    let (xp, xm) = (s.sample(x + h, t)?, s.sample(x - h, t)?);
    let p = Point::new(t, x, u);
    c.items()
        .iter()
        .map(|it| Ok((xp[it.target] - xm[it.target]) / (2.0 * h) - it.field.eval(&p)?))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    Estimate(f64),
    AtFloor,
}

impl Order {
    pub fn value(self) -> Option<f64> {
        match self {
            Order::Estimate(p) => Some(p),
            Order::AtFloor => None,
        }
    }
}

/// Least-squares slope of `log r` against `log h`.
pub fn fit_order(hs: &[f64], rs: &[f64]) -> Order {
    if rs.iter().any(|r| !(r.abs() >= FLOOR)) {
        return Order::AtFloor;
    }
    let lx: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = rs.iter().map(|r| r.abs().ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Order::Estimate(sxy / sxx)
}

/// Per-equation order from residuals at `h₀/2ᵏ`, `k < levels`.
pub fn convergence_order<R>(residual: R, h0: f64, levels: usize) -> Result<Vec<Order>>
where
    R: Fn(f64) -> Result<Vec<f64>>,
{
    if levels < 3 {
        return Err(Error::Input("convergence order needs at least 3 levels".into()));
    }
    let hs: Vec<f64> = (0..levels).map(|k| h0 / 2f64.powi(k as i32)).collect();
    let rs = hs.iter().map(|&h| residual(h)).collect::<Result<Vec<_>>>()?;
    let n = rs[0].len();
    Ok((0..n).map(|i| fit_order(&hs, &rs.iter().map(|r| r[i]).collect::<Vec<_>>())).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Singular,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationReport {
    pub eq: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Sup over grid points at each step.
    pub residuals: Vec<f64>,
    pub mean: Vec<f64>,
    /// Absent when fewer than 3 levels were evaluated or the residual sits at the floor.
    pub order: Option<f64>,
    pub at_floor: bool,
}

impl EquationReport {
    fn passes(&self, bound: f64) -> bool {
        let last = self.residuals.last().copied().unwrap_or(f64::INFINITY);
        last < bound && (self.at_floor || self.order.is_some_and(|p| p >= MIN_ORDER))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: String,
    pub variant: String,
    pub grid: GridSpec,
    pub h_ladder: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub points: usize,
    pub skipped: usize,
    pub sup_u: f64,
    pub bound: f64,
    pub per_equation: Vec<EquationReport>,
    pub constraints: Vec<EquationReport>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

fn summarise(eq: usize, label: Option<String>, per_h: &[Vec<f64>], hs: &[f64]) -> EquationReport {
    let residuals: Vec<f64> = per_h.iter().map(|v| v.iter().fold(0.0f64, |m, r| m.max(r.abs()))).collect();
    let mean: Vec<f64> = per_h
        .iter()
        .map(|v| if v.is_empty() { 0.0 } else { v.iter().map(|r| r.abs()).sum::<f64>() / v.len() as f64 })
        .collect();
    let (order, at_floor) = if hs.len() < 3 {
        (None, false)
    } else {
        match fit_order(hs, &residuals) {
            Order::Estimate(p) => (Some(p), false),
            Order::AtFloor => (None, true),
        }
    };
    EquationReport { eq, label, residuals, mean, order, at_floor }
}

/// Residual ladders of one sampler on a grid.
pub fn verify_sampler(
    sys: &JordanSystem,
    constraints: Option<&ConstraintSpec>,
    s: &dyn FieldSampler,
    grid: &GridSpec,
    ladder: &[f64],
) -> Result<VerificationReport> {
    grid.validate()?;
    if ladder.is_empty() || ladder.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::Input("h ladder must be non-empty and positive".into()));
    }
    let n = sys.n();
    let nc = constraints.map_or(0, |c| c.items().len());
    let mut pde: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); ladder.len()]; n];
    let mut con: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); ladder.len()]; nc];
    let (mut points, mut skipped, mut sup_u) = (0usize, 0usize, 0.0f64);
    for t in grid.ts() {
        for x in grid.xs() {
            points += 1;
            let mut rows = Vec::with_capacity(ladder.len());
            let ok = (|| -> Result<()> {
                for &h in ladder {
                    let r = pde_residual(sys, s, x, t, h)?;
                    let c = match constraints {
                        Some(c) => constraint_residual(c, s, x, t, h)?,
                        None => vec![],
                    };
                    rows.push((r, c));
                }
                let u = s.sample(x, t)?;
                sup_u = u.iter().fold(sup_u, |m, v| m.max(v.abs()));
                Ok(())
            })();
            if ok.is_err() || rows.iter().any(|(r, c)| r.iter().chain(c).any(|v| !v.is_finite())) {
                skipped += 1;
                continue;
            }
            for (k, (r, c)) in rows.into_iter().enumerate() {
                for i in 0..n {
                    pde[i][k].push(r[i]);
                }
                for i in 0..nc {
                    con[i][k].push(c[i]);
                }
            }
        }
    }
    let per_equation: Vec<EquationReport> = (0..n).map(|i| summarise(i + 1, None, &pde[i], ladder)).collect();
    let constraints_rep: Vec<EquationReport> = (0..nc)
        .map(|i| summarise(i + 1, constraints.map(|c| c.items()[i].label.clone()), &con[i], ladder))
        .collect();
    let bound = 1e-5 * (1.0 + sup_u);
    let evaluable = (points - skipped) as f64 / points as f64;
    let mut notes = Vec::new();
    if skipped > 0 {
        notes.push(format!("{skipped} of {points} grid points skipped (stencil not evaluable)"));
    }
    let verdict = if evaluable < MIN_EVALUABLE {
        notes.push(format!("only {:.0}% of the grid is evaluable", 100.0 * evaluable));
        Verdict::Singular
    } else if per_equation.iter().chain(&constraints_rep).all(|e| e.passes(bound)) {
        Verdict::Pass
    } else {
        for e in per_equation.iter().filter(|e| !e.passes(bound)) {
            notes.push(format!("equation {} fails (sup {:.3e}, order {:?})", e.eq, e.residuals.last().unwrap_or(&f64::NAN), e.order));
        }
        for e in constraints_rep.iter().filter(|e| !e.passes(bound)) {
            let l = e.label.as_deref().unwrap_or("?");
            notes.push(format!("constraint {l} fails (sup {:.3e}, order {:?})", e.residuals.last().unwrap_or(&f64::NAN), e.order));
        }
        Verdict::Fail
    };
    let (family, variant) = match s.tag().split_once('/') {
        Some((f, v)) => (f.to_string(), v.to_string()),
        None => (s.tag(), String::new()),
    };
    Ok(VerificationReport {
        family,
        variant,
        grid: *grid,
        h_ladder: ladder.to_vec(),
        seed: None,
        points,
        skipped,
        sup_u,
        bound,
        per_equation,
        constraints: constraints_rep,
        verdict,
        notes,
    })
}

/// Verify a family configuration against its system and constraints.
pub fn verify_family(fc: &FamilyConfig, grid: &GridSpec, ladder: &[f64]) -> Result<VerificationReport> {
    let c = fc.constraints()?;
    verify_sampler(fc.system(), Some(&c), fc, grid, ladder)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    pub family: String,
    /// `paper`, `rederived`, `both pass` or `both fail`.
    pub winner: String,
    pub failed_printed_formulas: Vec<String>,
    pub reports: Vec<VerificationReport>,
}

impl Adjudication {
    pub fn any_pass(&self) -> bool {
        self.reports.iter().any(|r| r.verdict == Verdict::Pass)
    }

    pub fn verdict(&self, v: Variant) -> Option<Verdict> {
        self.reports.iter().find(|r| r.variant == v.name()).map(|r| r.verdict)
    }
}

/// Compare the printed and re-derived variants of one family.
pub fn adjudicate(paper: &FamilyConfig, rederived: &FamilyConfig, grid: &GridSpec, ladder: &[f64]) -> Result<Adjudication> {
    if paper.kind() != rederived.kind() || paper.variant() != Variant::Paper || rederived.variant() != Variant::Rederived {
        return Err(Error::Input("adjudication needs the paper and re-derived variants of one family".into()));
    }
    let kind: FamilyKind = paper.kind();
    let rp = verify_family(paper, grid, ladder)?;
    let rr = verify_family(rederived, grid, ladder)?;
    if rp.verdict == Verdict::Singular && rr.verdict == Verdict::Singular {
        return Err(Error::Precondition(format!("neither variant of {kind} is evaluable on the grid")));
    }
    let winner = match (rp.verdict == Verdict::Pass, rr.verdict == Verdict::Pass) {
        (true, true) => "both pass",
        (true, false) => "paper",
        (false, true) => "rederived",
        (false, false) => "both fail",
    }
    .to_string();
    let failed_printed_formulas = if rp.verdict == Verdict::Pass {
        vec![]
    } else {
        kind.printed_differences().iter().map(|s| s.to_string()).collect()
    };
    Ok(Adjudication { family: kind.name().into(), winner, failed_printed_formulas, reports: vec![rp, rr] })
}
