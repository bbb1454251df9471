//! Quasilinear differential constraints `u^{k_α}_{α,x} = φ^α(t, x, u)` and
//! their compatibility residuals.

mod closed_form;
pub mod hardrod;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use closed_form::{phi_closed_form_2x2, ClosedFormPhi};

use crate::error::{Error, EvalError, Result};
use crate::fieldfn::{Field, GenericField, Gradient, Point, ScalarField};
use crate::systems::JordanSystem;

/// One equation `u^{target+1}_x = field`.
#[derive(Clone)]
pub struct Constraint {
    pub target: usize,
    pub field: Arc<dyn Field>,
    pub label: String,
}

impl std::fmt::Debug for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Constraint").field("target", &self.target).field("label", &self.label).finish()
    }
}

/// A set of constraints; the first `blocks` entries are the per-block ones.
#[derive(Clone, Debug)]
pub struct ConstraintSpec {
    items: Vec<Constraint>,
    blocks: usize,
}

impl ConstraintSpec {
    /// One field per block, each constraining the block's last variable.
    pub fn per_block(sys: &JordanSystem, fields: Vec<Arc<dyn Field>>) -> Result<Self> {
        if fields.len() != sys.blocks().len() {
            return Err(Error::Input(format!(
                "{} constraint fields for {} blocks",
                fields.len(),
                sys.blocks().len()
            )));
        }
        let mut items = Vec::with_capacity(fields.len());
        for (a, f) in fields.into_iter().enumerate() {
            if f.arity() != sys.n() {
                return Err(Error::Input(format!("constraint {} has arity {}, expected {}", a + 1, f.arity(), sys.n())));
            }
            let target = sys.offsets()[a] + sys.blocks()[a].size() - 1;
            items.push(Constraint { target, field: f, label: format!("phi{}", a + 1) });
        }
        Ok(Self { blocks: items.len(), items })
    }

    /// Parsed per-block expressions.
    pub fn from_exprs(sys: &JordanSystem, exprs: &[&str]) -> Result<Self> {
        let fields = exprs
            .iter()
            .map(|s| ScalarField::from_source(s, sys.n(), sys.params()).map(|f| Arc::new(f) as Arc<dyn Field>))
            .collect::<Result<Vec<_>>>()?;
        Self::per_block(sys, fields)
    }

    /// Append a constraint on an arbitrary variable.
    pub fn with_extra(mut self, target: usize, field: Arc<dyn Field>, label: &str) -> Self {
        self.items.push(Constraint { target, field, label: label.to_string() });
        self
    }

    pub fn items(&self) -> &[Constraint] {
        &self.items
    }

    /// The per-block field `φ^{α+1}`.
    pub fn phi(&self, alpha: usize) -> &dyn Field {
        &*self.items[alpha].field
    }

    pub fn block_count(&self) -> usize {
        self.blocks
    }

    pub fn from_descriptor(sys: &JordanSystem, d: &ConstraintDescriptor) -> Result<Self> {
        match d {
            ConstraintDescriptor::Phi { phi } => {
                let refs: Vec<&str> = phi.iter().map(String::as_str).collect();
                Self::from_exprs(sys, &refs)
            }
            ConstraintDescriptor::HardRod { hardrod_f } => {
                let f = hardrod::parse_f_triple(hardrod_f, sys.params())?;
                hardrod::hardrod_phi(&f, sys)
            }
        }
    }
}

/// JSON form: `{"phi": [...]}` or `{"hardrod_f": [f1, f2, f3]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ConstraintDescriptor {
    Phi { phi: Vec<String> },
    HardRod { hardrod_f: Vec<String> },
}

fn single_2x2(sys: &JordanSystem) -> Result<(&ScalarField, &ScalarField)> {
    match sys.blocks() {
        [b] if b.size() == 2 => Ok((&b.entries()[0], &b.entries()[1])),
        _ => Err(Error::Precondition("expected a single 2x2 Jordan block".into())),
    }
}

/// `(r_a, r_b)` with `r_a = ∂λ/∂u¹` and
/// `r_b = λ_{u²}(φ¹)² + λφ¹_x − φ¹_t − μφ¹φ¹_{u¹}`.
pub fn compat_residual_2x2(sys: &JordanSystem, c: &ConstraintSpec, p: &Point) -> Result<(f64, f64)> {
    let (lam, mu) = single_2x2(sys)?;
    let gl = Field::grad(lam, p)?;
    let l = Field::eval(lam, p)?;
    let m = Field::eval(mu, p)?;
    let phi = c.phi(0);
    let v = phi.eval(p)?;
    let g = phi.grad(p)?;
    let rb = gl.du[1] * v * v + l * g.dx - g.dt - m * v * g.du[0];
    Ok((gl.du[0], rb))
}

struct BlockData {
    lam: f64,
    lam_grad: Gradient,
    phi: f64,
    phi_grad: Gradient,
}

impl BlockData {
    /// `∂(λ¹φ)/∂u^i`.
    fn prod_u(&self, i: usize) -> f64 {
        self.lam_grad.du[i] * self.phi + self.lam * self.phi_grad.du[i]
    }

    fn prod_x(&self) -> f64 {
        self.lam_grad.dx * self.phi + self.lam * self.phi_grad.dx
    }
}

/// Compatibility conditions for one constraint per block, any number of blocks.
///
/// Layout: the block eigenvalue conditions `∂λ_α¹/∂u_α¹`, then for each
/// constraint `α` the coefficient conditions of every `u_{β,x}^j`
/// (`j ≥ 2` inside block `α`, `j ≥ 1` in other blocks, `j < k_β`) followed
/// by the free-term condition.
pub fn compat_residual_blocks(sys: &JordanSystem, c: &ConstraintSpec, p: &Point) -> Result<Vec<f64>> {
    let nb = sys.blocks().len();
    if c.block_count() != nb {
        return Err(Error::Input("constraint set does not match the block structure".into()));
    }
    let offs = sys.offsets();
    let ent = |b: usize, l: usize| -> Result<f64, EvalError> { Field::eval(&sys.blocks()[b].entries()[l - 1], p) };
    let data = (0..nb)
        .map(|a| {
            let lam = sys.blocks()[a].eigenvalue();
            Ok(BlockData {
                lam: Field::eval(lam, p)?,
                lam_grad: Field::grad(lam, p)?,
                phi: c.phi(a).eval(p)?,
                phi_grad: c.phi(a).grad(p)?,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;

    let mut out: Vec<f64> = (0..nb).map(|a| data[a].lam_grad.du[offs[a]]).collect();
    for (a, da) in data.iter().enumerate() {
        let mut free = da.phi_grad.dt - da.prod_x();
        for (b, db) in data.iter().enumerate() {
            let k = sys.blocks()[b].size();
            let idx = |j: usize| offs[b] + j - 1;
            let start = if a == b { 2 } else { 1 };
            for j in start..k {
                let mut s = 0.0;
                for l in 1..=j {
                    s += da.phi_grad.du[idx(j - l + 1)] * ent(b, l)?;
                }
                out.push(s - da.prod_u(idx(j)));
            }
            let mut s = 0.0;
            for l in 1..=k {
                s += da.phi_grad.du[idx(k - l + 1)] * ent(b, l)?;
            }
            free += db.phi * (s - da.prod_u(idx(k)));
        }
        out.push(free);
    }
    Ok(out)
}

/// The two-block conditions; length `2k + 2m − 2`.
pub fn compat_residual_two_block(sys: &JordanSystem, c: &ConstraintSpec, p: &Point) -> Result<Vec<f64>> {
    if sys.blocks().len() != 2 {
        return Err(Error::Precondition(format!("expected two blocks, got {}", sys.blocks().len())));
    }
    compat_residual_blocks(sys, c, p)
}

/// Total-derivative compatibility of one constraint in a general set.
#[derive(Clone, Debug, PartialEq)]
pub struct CompatCoefficients {
    pub target: usize,
    /// Coefficients of the unconstrained derivatives `u^{j+1}_x`.
    pub free: Vec<(usize, f64)>,
    pub constant: f64,
}

impl CompatCoefficients {
    pub fn max_abs(&self) -> f64 {
        self.free.iter().map(|(_, v)| v.abs()).fold(self.constant.abs(), f64::max)
    }
}

/// Expand `D_t φ_c − D_x (A u_x)_{target}` as an affine function of the
/// unconstrained first derivatives, for every constraint `c`.
///
/// Each constrained row of `A` may involve only constrained derivatives.
pub fn compat_coefficients(sys: &JordanSystem, c: &ConstraintSpec, p: &Point) -> Result<Vec<CompatCoefficients>> {
    let n = sys.n();
    let a = sys.assemble(p)?;
    let ag = entry_grads(sys, p)?;
    let mut slot: Vec<Option<usize>> = vec![None; n];
    for (ci, it) in c.items().iter().enumerate() {
        if it.target >= n || slot[it.target].is_some() {
            return Err(Error::Input(format!("invalid or repeated constraint target u{}", it.target + 1)));
        }
        slot[it.target] = Some(ci);
    }
    let vals = c.items().iter().map(|it| it.field.eval(p)).collect::<Result<Vec<_>, _>>()?;
    let grads = c.items().iter().map(|it| it.field.grad(p)).collect::<Result<Vec<_>, _>>()?;
    let free_idx: Vec<usize> = (0..n).filter(|&j| slot[j].is_none()).collect();

    // u_x as affine in the free derivatives: (constant, coefficient per free slot)
    let ux: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|j| match slot[j] {
            Some(ci) => (vals[ci], vec![0.0; free_idx.len()]),
            None => {
                let mut e = vec![0.0; free_idx.len()];
                e[free_idx.iter().position(|&f| f == j).unwrap()] = 1.0;
                (0.0, e)
            }
        })
        .collect();
    let ut: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| {
            let mut c0 = 0.0;
            let mut cf = vec![0.0; free_idx.len()];
            for j in 0..n {
                c0 += a[(i, j)] * ux[j].0;
                for (k, v) in ux[j].1.iter().enumerate() {
                    cf[k] += a[(i, j)] * v;
                }
            }
            (c0, cf)
        })
        .collect();

    let mut out = Vec::with_capacity(c.items().len());
    for (ci, it) in c.items().iter().enumerate() {
        let r = it.target;
        if free_idx.iter().any(|&j| !structurally_zero(sys, r, j)) {
            return Err(Error::Precondition(format!(
                "row u{} of A couples to an unconstrained derivative",
                r + 1
            )));
        }
        let g = &grads[ci];
        // D_t φ
        let mut c0 = g.dt;
        let mut cf = vec![0.0; free_idx.len()];
        for i in 0..n {
            c0 += g.du[i] * ut[i].0;
            for (k, v) in ut[i].1.iter().enumerate() {
                cf[k] += g.du[i] * v;
            }
        }
        // ψ = Σ_j A_{rj} φ_j over constrained j; D_x ψ
        let mut psi_x = 0.0;
        let mut psi_u = vec![0.0; n];
        for j in 0..n {
            if let Some(cj) = slot[j] {
                psi_x += a[(r, j)] * grads[cj].dx;
                for i in 0..n {
                    psi_u[i] += ag[r][j][i] * vals[cj] + a[(r, j)] * grads[cj].du[i];
                }
            }
        }
        c0 -= psi_x;
        for i in 0..n {
            c0 -= psi_u[i] * ux[i].0;
            for (k, v) in ux[i].1.iter().enumerate() {
                cf[k] -= psi_u[i] * v;
            }
        }
        out.push(CompatCoefficients { target: r, free: free_idx.iter().copied().zip(cf).collect(), constant: c0 });
    }
    Ok(out)
}

fn structurally_zero(sys: &JordanSystem, i: usize, j: usize) -> bool {
    for (b, &o) in sys.blocks().iter().zip(sys.offsets()) {
        if (o..o + b.size()).contains(&i) {
            if j < i || j >= o + b.size() {
                return true;
            }
            let e = &b.entries()[j - i];
            return e.free_vars().is_empty() && e.eval_sigma(0.0) == Ok(0.0);
        }
    }
    true
}

/// `ag[i][j][l] = ∂A_{ij}/∂u^l`.
fn entry_grads(sys: &JordanSystem, p: &Point) -> Result<Vec<Vec<Vec<f64>>>, EvalError> {
    let n = sys.n();
    let mut ag = vec![vec![vec![0.0; n]; n]; n];
    for (b, &o) in sys.blocks().iter().zip(sys.offsets()) {
        let k = b.size();
        for (m, e) in b.entries().iter().enumerate() {
            let g = Field::grad(e, p)?.du;
            for i in 0..k - m {
                ag[o + i][o + i + m] = g.clone();
            }
        }
    }
    Ok(ag)
}

/// Sample points on a uniform grid of the box `[lo, hi]^n`, `per_axis` per side.
pub(crate) fn box_grid(n: usize, lo: f64, hi: f64, per_axis: usize) -> Vec<Point> {
    let mut pts = Vec::new();
    let total = per_axis.pow(n as u32);
    for mut idx in 0..total {
        let mut u = Vec::with_capacity(n);
        for _ in 0..n {
            let k = idx % per_axis;
            idx /= per_axis;
            u.push(lo + (hi - lo) * (k as f64 + 0.5) / per_axis as f64);
        }
        pts.push(Point::from_u(&u));
    }
    pts
}

/// Errors with a precondition failure if any block eigenvalue depends on its
/// block's first variable at the sample points.
pub fn require_degenerate(sys: &JordanSystem, samples: &[Point]) -> Result<()> {
    for p in samples {
        let d = sys.block_degeneracy(p)?;
        if let Some((a, v)) = d.iter().enumerate().find(|(_, v)| v.abs() > 1e-8) {
            return Err(Error::Precondition(format!(
                "system is not linearly degenerate: block {} has d(lambda)/du = {v} at u = {:?}",
                a + 1,
                p.u
            )));
        }
    }
    Ok(())
}

pub(crate) fn parse_fields(srcs: &[String], arity: usize, params: &BTreeMap<String, f64>) -> Result<Vec<ScalarField>> {
    srcs.iter().map(|s| ScalarField::from_source(s, arity, params)).collect()
}

/// Adapter so a generic field can be shared behind `Arc<dyn Field>`.
pub fn shared<F: GenericField + 'static>(f: F) -> Arc<dyn Field> {
    Arc::new(f)
}
