use super::{box_grid, require_degenerate, single_2x2};
use crate::error::{Error, EvalError, Result};
use crate::fieldfn::{integrate, Dual, GenericField, Scalar, ScalarField, Var};
use crate::systems::JordanSystem;

/// `φ(u¹, u²) = f¹(u²) exp(∫_{ref}^{u¹} λ_{u²}/μ dξ)` for a 2×2 block.
#[derive(Clone, Debug)]
pub struct ClosedFormPhi {
    lambda: ScalarField,
    mu: ScalarField,
    f1: ScalarField,
    u1_ref: f64,
}

impl ClosedFormPhi {
    pub fn f1(&self) -> &ScalarField {
        &self.f1
    }

    pub fn u1_ref(&self) -> f64 {
        self.u1_ref
    }

    pub fn lambda(&self) -> &ScalarField {
        &self.lambda
    }

    pub fn mu(&self) -> &ScalarField {
        &self.mu
    }

    /// `∫_{ref}^{u¹} λ_{u²}/μ dξ`.
    pub fn exponent_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<T, EvalError> {
        let u2 = u[1];
        let integrand = |xi: T| {
            let (dt, dx) = (Dual::constant(t), Dual::constant(x));
            let lu2 = self.lambda.eval_at(dt, dx, &[Dual::constant(xi), Dual::var(u2)])?.eps;
            let m = self.mu.eval_at(t, x, &[xi, u2])?;
            if m.re().abs() < 1e-14 {
                return Err(EvalError::Singular(format!("mu vanishes at u1 = {}", xi.re())));
            }
            Ok(lu2 / m)
        };
        integrate(integrand, T::cst(self.u1_ref), u[0])
    }
}

impl GenericField for ClosedFormPhi {
    fn arity(&self) -> usize {
        2
    }

    fn eval_at<T: Scalar>(&self, t: T, x: T, u: &[T]) -> Result<T, EvalError> {
        let e = self.exponent_at(t, x, u)?;
        Ok(self.f1.eval_at(t, x, u)? * e.exp())
    }
}

/// Prepare `f¹` as a field of `u²` on a two-component system.
pub(crate) fn f1_of_u2(f1: &ScalarField) -> Result<ScalarField> {
    let f = if GenericField::arity(f1) == 2 { f1.clone() } else { f1.with_arity(2).map_err(|e| Error::Parse { src: f1.source().into(), source: e })? };
    if !f.depends_only_on(&[Var::U(1)]) {
        return Err(Error::Input(format!("f1 = '{}' must depend on u2 only", f1.source())));
    }
    Ok(f)
}

/// The constraint field compatible with a linearly degenerate 2×2 block.
pub fn phi_closed_form_2x2(sys: &JordanSystem, f1: &ScalarField, u1_ref: f64) -> Result<ClosedFormPhi> {
    let (lam, mu) = single_2x2(sys)?;
    require_degenerate(sys, &box_grid(2, 0.5, 2.0, 5))?;
    for v in [lam, mu] {
        if v.free_vars().iter().any(|v| matches!(v, Var::T | Var::X | Var::S)) {
            return Err(Error::Input("velocity entries must depend on u only".into()));
        }
    }
    Ok(ClosedFormPhi { lambda: lam.clone(), mu: mu.clone(), f1: f1_of_u2(f1)?, u1_ref })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldfn::{Field, Point};
    use crate::systems::catalog;

    #[test]
    fn canonical_gives_exponential() {
        let sys = catalog::canonical();
        let phi = phi_closed_form_2x2(&sys, &ScalarField::parse("1", 2).unwrap(), 0.0).unwrap();
        for u in [[0.0, 1.0], [0.7, -1.0], [-1.3, 2.0]] {
            let v = phi.eval(&Point::from_u(&u)).unwrap();
            assert!((v - u[0].exp()).abs() < 1e-12 * u[0].exp());
        }
    }

    #[test]
    fn constant_lambda_and_rational_mu() {
        let sys = JordanSystem::from_exprs(&[&["3", "u1*u2 + 1"]], &[]).unwrap();
        let phi = phi_closed_form_2x2(&sys, &ScalarField::parse("u2^2", 2).unwrap(), 0.0).unwrap();
        assert_eq!(phi.eval(&Point::from_u(&[1.0, 3.0])).unwrap(), 9.0);
        let sys = JordanSystem::from_exprs(&[&["u2", "u1 + 1"]], &[]).unwrap();
        let phi = phi_closed_form_2x2(&sys, &ScalarField::parse("1", 2).unwrap(), 0.0).unwrap();
        assert!((phi.eval(&Point::from_u(&[1.0, 0.5])).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn derivatives_flow_through_quadrature() {
        let sys = JordanSystem::from_exprs(&[&["u2", "u1 + 1"]], &[]).unwrap();
        let phi = phi_closed_form_2x2(&sys, &ScalarField::parse("u2", 2).unwrap(), 0.0).unwrap();
        // φ = u2 (u1 + 1)
        let g = phi.grad(&Point::from_u(&[1.0, 0.5])).unwrap();
        assert!((g.du[0] - 0.5).abs() < 1e-11);
        assert!((g.du[1] - 2.0).abs() < 1e-11);
    }

    #[test]
    fn preconditions() {
        let one = ScalarField::parse("1", 2).unwrap();
        assert!(matches!(phi_closed_form_2x2(&catalog::counterexample(), &one, 0.0), Err(Error::Precondition(_))));
        assert!(matches!(phi_closed_form_2x2(&catalog::wdvv_t(), &one, 0.0), Err(Error::Precondition(_))));
        let bad = ScalarField::parse("u1", 2).unwrap();
        assert!(matches!(phi_closed_form_2x2(&catalog::canonical(), &bad, 0.0), Err(Error::Input(_))));
        let sys = JordanSystem::from_exprs(&[&["1", "u1"]], &[]).unwrap();
        let phi = phi_closed_form_2x2(&sys, &one, -1.0).unwrap();
        assert!(phi.eval(&Point::from_u(&[1.0, 1.0])).is_err());
    }
}
