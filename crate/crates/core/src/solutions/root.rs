use crate::error::{EvalError, SolveError};

/// Safeguarded Newton iteration on a sign-changing bracket.
///
/// `g` returns the residual and its derivative.
pub fn newton_bisect<G>(g: G, mut lo: f64, mut hi: f64, g_lo: f64, guess: Option<f64>, tol: f64) -> Result<f64, SolveError>
where
    G: Fn(f64) -> Result<(f64, f64), EvalError>,
{
    debug_assert!(lo < hi);
    let lo_sign = g_lo.signum();
    let mut s = guess.filter(|v| *v > lo && *v < hi).unwrap_or(0.5 * (lo + hi));
    let mut best = f64::INFINITY;
    for _ in 0..200 {
        let (v, dv) = g(s)?;
        best = best.min(v.abs());
        if v.abs() < tol {
            return Ok(s);
        }
        if v.signum() == lo_sign {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - v / dv;
        s = if dv.is_finite() && dv != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 4.0 * f64::EPSILON * s.abs().max(1.0) {
            let (v, _) = g(s)?;
            if v.abs() < tol {
                return Ok(s);
            }
            return Err(SolveError::NotConverged { residual: v.abs().min(best) });
        }
    }
    Err(SolveError::NotConverged { residual: best })
}
