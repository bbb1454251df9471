//! Block-diagonal upper-triangular Toeplitz systems `u_t = A(u) u_x`.

pub mod catalog;
mod matrix;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use matrix::{faddeev_leverrier, Matrix};

use crate::error::{Error, EvalError, Result};
use crate::fieldfn::expr::is_reserved;
use crate::fieldfn::{Dual, GenericField, Point, Scalar, ScalarField};

/// Eigenvalues closer than this trigger a warning.
pub const EIGEN_WARN_TOL: f64 = 1e-8;

/// One Toeplitz block: `entries[m]` sits on the `m`-th superdiagonal.
#[derive(Clone, Debug)]
pub struct BlockSpec {
    entries: Vec<ScalarField>,
}

impl BlockSpec {
    pub fn new(entries: Vec<ScalarField>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Input("a block needs at least one entry".into()));
        }
        Ok(Self { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[ScalarField] {
        &self.entries
    }

    /// The block eigenvalue `λ_α¹`.
    pub fn eigenvalue(&self) -> &ScalarField {
        &self.entries[0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDescriptor {
    pub size: usize,
    pub entries: Vec<String>,
}

/// JSON form of a [`JordanSystem`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescriptor {
    pub n: usize,
    pub blocks: Vec<BlockDescriptor>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct JordanSystem {
    blocks: Vec<BlockSpec>,
    offsets: Vec<usize>,
    n: usize,
    params: BTreeMap<String, f64>,
}

impl JordanSystem {
    pub fn new(blocks: Vec<BlockSpec>) -> Result<Self> {
        Self::with_params(blocks, BTreeMap::new())
    }

    fn with_params(blocks: Vec<BlockSpec>, params: BTreeMap<String, f64>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Input("a system needs at least one block".into()));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut n = 0;
        for b in &blocks {
            offsets.push(n);
            n += b.size();
        }
        for (a, b) in blocks.iter().enumerate() {
            for (m, e) in b.entries.iter().enumerate() {
                if GenericField::arity(e) != n {
                    return Err(Error::Input(format!(
                        "block {} entry {} has arity {}, system dimension is {n}",
                        a + 1,
                        m + 1,
                        GenericField::arity(e)
                    )));
                }
            }
        }
        Ok(Self { blocks, offsets, n, params })
    }

    /// Build from entry expressions, one list per block.
    pub fn from_exprs(blocks: &[&[&str]], params: &[(&str, f64)]) -> Result<Self> {
        let desc = SystemDescriptor {
            n: blocks.iter().map(|b| b.len()).sum(),
            blocks: blocks
                .iter()
                .map(|b| BlockDescriptor { size: b.len(), entries: b.iter().map(|s| s.to_string()).collect() })
                .collect(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        };
        Self::from_descriptor(&desc)
    }

    pub fn from_descriptor(d: &SystemDescriptor) -> Result<Self> {
        for (name, v) in &d.params {
            if is_reserved(name) {
                return Err(Error::Input(format!("parameter name '{name}' is reserved")));
            }
            if !v.is_finite() {
                return Err(Error::Input(format!("parameter '{name}' is not finite")));
            }
        }
        let total: usize = d.blocks.iter().map(|b| b.size).sum();
        if total != d.n {
            return Err(Error::Input(format!("block sizes sum to {total}, but n = {}", d.n)));
        }
        let mut blocks = Vec::with_capacity(d.blocks.len());
        for (a, b) in d.blocks.iter().enumerate() {
            if b.size == 0 || b.entries.len() != b.size {
                return Err(Error::Input(format!(
                    "block {} declares size {} with {} entries",
                    a + 1,
                    b.size,
                    b.entries.len()
                )));
            }
            let entries = b
                .entries
                .iter()
                .map(|src| ScalarField::from_source(src, d.n, &d.params))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(BlockSpec::new(entries)?);
        }
        Self::with_params(blocks, d.params.clone())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: SystemDescriptor = serde_json::from_str(s)?;
        Self::from_descriptor(&d)
    }

    pub fn descriptor(&self) -> SystemDescriptor {
        SystemDescriptor {
            n: self.n,
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDescriptor {
                    size: b.size(),
                    entries: b.entries.iter().map(|e| e.source().to_string()).collect(),
                })
                .collect(),
            params: self.params.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    fn check_point(&self, p: &Point) -> Result<(), EvalError> {
        if p.u.len() != self.n {
            return Err(EvalError::Arity { expected: self.n, got: p.u.len() });
        }
        Ok(())
    }

    /// `A(u)` in any scalar type.
    pub fn assemble_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<Matrix<T>, EvalError> {
        let mut a = Matrix::zeros(self.n);
        for (b, &o) in self.blocks.iter().zip(&self.offsets) {
            let k = b.size();
            for (m, e) in b.entries.iter().enumerate() {
                let v = e.eval_at(t, x, u)?;
                for i in 0..k - m {
                    a[(o + i, o + i + m)] = v;
                }
            }
        }
        Ok(a)
    }

    pub fn assemble(&self, p: &Point) -> Result<Matrix<f64>, EvalError> {
        self.check_point(p)?;
        self.assemble_at(p.t, p.x, &p.u)
    }

    pub fn char_poly_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<Vec<T>, EvalError> {
        Ok(faddeev_leverrier(&self.assemble_at(t, x, u)?))
    }

    pub fn char_poly(&self, p: &Point) -> Result<Vec<f64>, EvalError> {
        self.check_point(p)?;
        self.char_poly_at(p.t, p.x, &p.u)
    }

    /// `grads[i][j] = ∂f_{i+1}/∂u^{j+1}`.
    pub fn char_poly_grads(&self, p: &Point) -> Result<Vec<Vec<f64>>, EvalError> {
        self.check_point(p)?;
        let n = self.n;
        let mut grads = vec![vec![0.0; n]; n];
        let t = Dual::constant(p.t);
        let x = Dual::constant(p.x);
        for j in 0..n {
            let u: Vec<Dual<f64>> = p.u.iter().enumerate().map(|(i, &v)| Dual::seeded(v, i == j)).collect();
            let f = self.char_poly_at(t, x, &u)?;
            for (i, fi) in f.iter().enumerate() {
                grads[i][j] = fi.eps;
            }
        }
        Ok(grads)
    }

    /// The row `∇f₁Aⁿ⁻¹ + ∇f₂Aⁿ⁻² + … + ∇fₙ`.
    pub fn lindeg_residual(&self, p: &Point) -> Result<Vec<f64>, EvalError> {
        let a = self.assemble(p)?;
        let grads = self.char_poly_grads(p)?;
        let mut r = grads[0].clone();
        for g in &grads[1..] {
            r = a.left_mul(&r);
            for (ri, gi) in r.iter_mut().zip(g) {
                *ri += gi;
            }
        }
        Ok(r)
    }

    /// `∂λ_α¹/∂u_α¹` for every block.
    pub fn block_degeneracy(&self, p: &Point) -> Result<Vec<f64>, EvalError> {
        self.check_point(p)?;
        let t = Dual::constant(p.t);
        let x = Dual::constant(p.x);
        self.blocks
            .iter()
            .zip(&self.offsets)
            .map(|(b, &o)| {
                let u: Vec<Dual<f64>> = p.u.iter().enumerate().map(|(i, &v)| Dual::seeded(v, i == o)).collect();
                Ok(b.eigenvalue().eval_at(t, x, &u)?.eps)
            })
            .collect()
    }

    pub fn eigenvalues(&self, p: &Point) -> Result<Vec<f64>, EvalError> {
        self.check_point(p)?;
        self.blocks.iter().map(|b| b.eigenvalue().eval_at(p.t, p.x, &p.u)).collect()
    }

    /// Messages for pairs of block eigenvalues that nearly coincide at `p`.
    pub fn eigenvalue_warnings(&self, p: &Point) -> Result<Vec<String>, EvalError> {
        let ev = self.eigenvalues(p)?;
        let mut out = Vec::new();
        for a in 0..ev.len() {
            for b in a + 1..ev.len() {
                if (ev[a] - ev[b]).abs() < EIGEN_WARN_TOL {
                    out.push(format!(
                        "blocks {} and {} have coincident eigenvalues {} at u = {:?}",
                        a + 1,
                        b + 1,
                        ev[a],
                        p.u
                    ));
                }
            }
        }
        Ok(out)
    }

    /// Max entry of `(A_α − λ_α¹ I)^{k_α}` for every block.
    pub fn nilpotency_defect(&self, p: &Point) -> Result<Vec<f64>, EvalError> {
        let a = self.assemble(p)?;
        let ev = self.eigenvalues(p)?;
        Ok(self
            .blocks
            .iter()
            .zip(&self.offsets)
            .zip(&ev)
            .map(|((b, &o), &lam)| {
                let k = b.size();
                let mut blk = Matrix::zeros(k);
                for i in 0..k {
                    for j in 0..k {
                        blk[(i, j)] = a[(o + i, o + j)];
                    }
                }
                blk.add_diag(-lam);
                let mut pow = Matrix::identity(k);
                for _ in 0..k {
                    pow = pow.mul(&blk);
                }
                pow.max_abs()
            })
            .collect())
    }
}
