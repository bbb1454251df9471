//! Dubrovin–Novikov structures of 2×2 Jordan blocks.

use std::sync::Arc;

use crate::constraints::{phi_closed_form_2x2, shared, ClosedFormPhi};
use crate::error::{Error, EvalError, Result};
use crate::fieldfn::{integrate, Dual, Field, GenericField, Point, Scalar, ScalarField};
use crate::systems::JordanSystem;

/// `|g₁₂|` below this counts as a degenerate metric.
pub const DEGENERATE_TOL: f64 = 1e-12;

type Gamma = [[[f64; 2]; 2]; 2];

/// `g = g₁₂(du¹⊗du² + du²⊗du¹) + g₂₂ du²⊗du²`.
#[derive(Clone)]
pub struct HankelMetric2 {
    pub g12: Arc<dyn Field>,
    pub g22: Arc<dyn Field>,
}

impl std::fmt::Debug for HankelMetric2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HankelMetric2").finish_non_exhaustive()
    }
}

impl HankelMetric2 {
    pub fn new(g12: Arc<dyn Field>, g22: Arc<dyn Field>) -> Self {
        Self { g12, g22 }
    }

    pub fn from_exprs(g12: &str, g22: &str) -> Result<Self> {
        let p = |s: &str| -> Result<Arc<dyn Field>> {
            Ok(shared(ScalarField::from_source(s, 2, &Default::default())?))
        };
        Ok(Self::new(p(g12)?, p(g22)?))
    }

    /// Components `[[g₁₁, g₁₂], [g₂₁, g₂₂]]`.
    pub fn at(&self, p: &Point) -> Result<[[f64; 2]; 2], EvalError> {
        let (a, b) = (self.g12.eval(p)?, self.g22.eval(p)?);
        Ok([[0.0, a], [a, b]])
    }

    /// `∂_k g_{ij}` as `d[k][i][j]`.
    fn derivs(&self, p: &Point) -> Result<[[[f64; 2]; 2]; 2], EvalError> {
        let (a, b) = (self.g12.grad(p)?, self.g22.grad(p)?);
        let mut d = [[[0.0; 2]; 2]; 2];
        for k in 0..2 {
            d[k] = [[0.0, a.du[k]], [a.du[k], b.du[k]]];
        }
        Ok(d)
    }

    pub fn inverse(&self, p: &Point) -> Result<[[f64; 2]; 2], EvalError> {
        let g = self.at(p)?;
        if g[0][1].abs() < DEGENERATE_TOL || !g[0][1].is_finite() {
            return Err(EvalError::Singular(format!("degenerate metric, g12 = {:e}", g[0][1])));
        }
        let a = g[0][1];
        Ok([[-g[1][1] / (a * a), 1.0 / a], [1.0 / a, 0.0]])
    }

    /// Levi-Civita symbols `Γ^i_{jk}` as `Γ[i][j][k]`.
    pub fn christoffel(&self, p: &Point) -> Result<Gamma, EvalError> {
        check_two(p)?;
        let gi = self.inverse(p)?;
        let d = self.derivs(p)?;
        let mut gam = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    gam[i][j][k] = (0..2).map(|l| 0.5 * gi[i][l] * (d[j][l][k] + d[k][l][j] - d[l][j][k])).sum();
                }
            }
        }
        Ok(gam)
    }
}

fn check_two(p: &Point) -> Result<(), EvalError> {
    if p.n() != 2 {
        return Err(EvalError::Arity { expected: 2, got: p.n() });
    }
    Ok(())
}

/// `g₁₂ = φ/μ` with `φ` the closed-form constraint.
#[derive(Clone, Debug)]
struct MetricG12 {
    phi: ClosedFormPhi,
}

impl GenericField for MetricG12 {
    fn arity(&self) -> usize {
        2
    }
    fn eval_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<T, EvalError> {
        let m = self.phi.mu().eval_at(t, x, u)?;
        if m.re().abs() < 1e-14 {
            return Err(EvalError::Singular("mu vanishes".into()));
        }
        Ok(self.phi.eval_at(t, x, u)? / m)
    }
}

/// `∂θ/∂u¹`.
#[derive(Clone, Debug)]
struct ThetaU1 {
    phi: ClosedFormPhi,
}

impl GenericField for ThetaU1 {
    fn arity(&self) -> usize {
        2
    }
    fn eval_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<T, EvalError> {
        let v = [Dual::var(u[0]), Dual::constant(u[1])];
        Ok(self.phi.eval_at(Dual::constant(t), Dual::constant(x), &v)?.eps)
    }
}

/// The Hankel metric `g₁₂ = (f¹(u²)/μ) exp(∫ λ_{u²}/μ du¹)`, `g₂₂ = 0`.
pub fn build_metric(sys: &JordanSystem, f1: &ScalarField, u1_ref: f64) -> Result<HankelMetric2> {
    let phi = phi_closed_form_2x2(sys, f1, u1_ref)?;
    Ok(HankelMetric2::new(shared(MetricG12 { phi }), shared(ScalarField::constant(0.0, 2))))
}

/// The metric `g₁₂ = ∂θ/∂u¹`, `g₂₂ = 0`.
pub fn theta_metric(sys: &JordanSystem, f: &ScalarField, u1_ref: f64) -> Result<HankelMetric2> {
    let phi = phi_closed_form_2x2(sys, f, u1_ref)?;
    Ok(HankelMetric2::new(shared(ThetaU1 { phi }), shared(ScalarField::constant(0.0, 2))))
}

fn two_by_two(sys: &JordanSystem) -> Result<()> {
    if sys.n() != 2 || sys.blocks().len() != 1 {
        return Err(Error::Precondition("Hankel metrics are defined for a single 2x2 block".into()));
    }
    Ok(())
}

/// Symmetry and covariant residuals of the Tsarev conditions at `p`.
pub fn tsarev_residual(sys: &JordanSystem, m: &HankelMetric2, p: &Point) -> Result<(f64, f64)> {
    two_by_two(sys)?;
    let g = m.at(p)?;
    m.inverse(p)?;
    let a = sys.assemble(p)?;
    let mut r_sym: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let l: f64 = (0..2).map(|s| g[i][s] * a[(s, j)]).sum();
            let r: f64 = (0..2).map(|s| g[j][s] * a[(s, i)]).sum();
            r_sym = r_sym.max((l - r).abs());
        }
    }
    // ∂_m A^i_j
    let mut da = [[[0.0; 2]; 2]; 2];
    for (k, dk) in da.iter_mut().enumerate() {
        let u: Vec<Dual<f64>> = (0..2).map(|q| Dual::seeded(p.u[q], q == k)).collect();
        let ak = sys.assemble_at(Dual::constant(p.t), Dual::constant(p.x), &u)?;
        for i in 0..2 {
            for j in 0..2 {
                dk[i][j] = ak[(i, j)].eps;
            }
        }
    }
    let gam = m.christoffel(p)?;
    // ∇_i A^j_k − ∇_k A^j_i; the Γ^s_{ik} terms cancel by symmetry
    let mut r_cov: f64 = 0.0;
    for j in 0..2 {
        let (i, k) = (0, 1);
        let mut c = da[i][j][k] - da[k][j][i];
        for s in 0..2 {
            c += gam[j][i][s] * a[(s, k)] - gam[j][k][s] * a[(s, i)];
        }
        r_cov = r_cov.max(c.abs());
    }
    Ok((r_sym, r_cov))
}

fn shifted(p: &Point, k: usize, h: f64) -> Point {
    let mut q = p.clone();
    q.u[k] += h;
    q
}

/// `∂_k Γ` by centred differences with one Richardson step.
fn gamma_derivs(m: &HankelMetric2, p: &Point, h: f64) -> Result<[Gamma; 2], EvalError> {
    let mut out = [[[[0.0; 2]; 2]; 2]; 2];
    let cd = |k: usize, h: f64| -> Result<Gamma, EvalError> {
        let (gp, gm) = (m.christoffel(&shifted(p, k, h))?, m.christoffel(&shifted(p, k, -h))?);
        let mut d = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    d[i][j][l] = (gp[i][j][l] - gm[i][j][l]) / (2.0 * h);
                }
            }
        }
        Ok(d)
    };
    for (k, ok) in out.iter_mut().enumerate() {
        let (d1, d2) = (cd(k, h)?, cd(k, 0.5 * h)?);
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    ok[i][j][l] = (4.0 * d2[i][j][l] - d1[i][j][l]) / 3.0;
                }
            }
        }
    }
    Ok(out)
}

/// Scalar curvature of `m` at `p`.
pub fn scalar_curvature(m: &HankelMetric2, p: &Point, h: f64) -> Result<f64> {
    check_two(p)?;
    let gi = m.inverse(p)?;
    let gam = m.christoffel(p)?;
    let dg = gamma_derivs(m, p, h)?;
    // R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{kq} Γ^q_{lj} − Γ^i_{lq} Γ^q_{kj}
    let riem = |i: usize, j: usize, k: usize, l: usize| {
        let mut r = dg[k][i][l][j] - dg[l][i][k][j];
        for q in 0..2 {
            r += gam[i][k][q] * gam[q][l][j] - gam[i][l][q] * gam[q][k][j];
        }
        r
    };
    let mut s = 0.0;
    for j in 0..2 {
        for l in 0..2 {
            let ric: f64 = (0..2).map(|k| riem(k, j, k, l)).sum();
            s += gi[j][l] * ric;
        }
    }
    Ok(s)
}

/// `|R|` at `p`.
pub fn flatness_residual(m: &HankelMetric2, p: &Point, h: f64) -> Result<f64> {
    Ok(scalar_curvature(m, p, h)?.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaReport {
    pub theta: f64,
    pub phi: f64,
    pub diff: f64,
    /// `∂θ/∂u¹`, the `g₁₂` of the associated metric.
    pub theta_u1: f64,
    pub degenerate: bool,
}

/// `θ = f(u²) exp(∫_{ref}^{u¹} λ_{u²}/μ dξ)` compared with the closed-form constraint.
pub fn theta(sys: &JordanSystem, f: &ScalarField, u1_ref: f64, p: &Point) -> Result<ThetaReport> {
    let phi = phi_closed_form_2x2(sys, f, u1_ref)?;
    check_two(p)?;
    let (lam, mu) = (phi.lambda(), phi.mu());
    let integrand = |xi: f64| -> Result<f64, EvalError> {
        let q = Point::new(p.t, p.x, vec![xi, p.u[1]]);
        let m = mu.eval(&q)?;
        if m.abs() < 1e-14 {
            return Err(EvalError::Singular(format!("mu vanishes at u1 = {xi}")));
        }
        Ok(lam.grad(&q)?.du[1] / m)
    };
    let e = integrate(integrand, u1_ref, p.u[0])?;
    let th = phi.f1().eval(p)? * e.exp();
    let ph = phi.eval(p)?;
    let theta_u1 = ThetaU1 { phi }.eval(p)?;
    Ok(ThetaReport { theta: th, phi: ph, diff: (th - ph).abs(), theta_u1, degenerate: theta_u1.abs() < DEGENERATE_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::catalog;

    fn one() -> ScalarField {
        ScalarField::parse("1", 2).unwrap()
    }

    #[test]
    fn canonical_metric_is_exponential() {
        let m = build_metric(&catalog::canonical(), &one(), 0.0).unwrap();
        for u in [[0.0, 1.0], [0.5, -2.0]] {
            let g = m.at(&Point::from_u(&u)).unwrap();
            assert!((g[0][1] - u[0].exp()).abs() < 1e-12 * u[0].exp());
            assert_eq!(g[1][1], 0.0);
        }
    }

    #[test]
    fn metric_examples() {
        let sys = JordanSystem::from_exprs(&[&["u2", "u1 + 1"]], &[]).unwrap();
        let m = build_metric(&sys, &one(), 0.0).unwrap();
        assert!((m.at(&Point::from_u(&[1.0, 0.3])).unwrap()[0][1] - 1.0).abs() < 1e-12);
        let sys = JordanSystem::from_exprs(&[&["2", "u1^2 + 1"]], &[]).unwrap();
        let m = build_metric(&sys, &ScalarField::parse("u2", 2).unwrap(), 0.0).unwrap();
        assert!((m.at(&Point::from_u(&[1.0, 3.0])).unwrap()[0][1] - 1.5).abs() < 1e-14);
        assert!(matches!(build_metric(&catalog::counterexample(), &one(), 0.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn constant_metric_with_non_degenerate_coupling() {
        let sys = JordanSystem::from_exprs(&[&["u2", "1"]], &[]).unwrap();
        let m = HankelMetric2::from_exprs("1", "0").unwrap();
        let (s, c) = tsarev_residual(&sys, &m, &Point::from_u(&[0.3, 0.8])).unwrap();
        assert_eq!(s, 0.0);
        assert!((c - 1.0).abs() < 1e-15);
        assert!(flatness_residual(&m, &Point::from_u(&[0.3, 0.8]), 1e-4).unwrap() < 1e-8);
    }

    #[test]
    fn degenerate_metric_is_an_error() {
        let m = HankelMetric2::from_exprs("0", "1").unwrap();
        assert!(tsarev_residual(&catalog::canonical(), &m, &Point::from_u(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn sphere_like_metric_is_curved() {
        // 2 e^{u1 u2} du1 du2: R = -2 (ln g12)_{12} / g12
        let m = HankelMetric2::from_exprs("exp(u1*u2)", "0").unwrap();
        let p = Point::from_u(&[0.3, 0.4]);
        let r = scalar_curvature(&m, &p, 1e-4).unwrap();
        let expected = -2.0 / (0.12f64).exp();
        assert!((r - expected).abs() < 1e-6, "{r} vs {expected}");
    }

    #[test]
    fn constant_theta_is_flagged() {
        let sys = JordanSystem::from_exprs(&[&["1", "u1 + 2"]], &[]).unwrap();
        let r = theta(&sys, &one(), 0.0, &Point::from_u(&[0.5, 0.5])).unwrap();
        assert_eq!(r.theta, 1.0);
        assert!(r.degenerate);
    }
}
