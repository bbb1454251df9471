use crate::error::{Error, Result};

/// Local error bound for a single accepted step.
pub const STEP_TOL: f64 = 1e-8;

fn rk4_step<F>(f: &F, s: f64, y: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let axpy = |a: &[f64], k: &[f64], c: f64| a.iter().zip(k).map(|(x, d)| x + c * d).collect::<Vec<_>>();
    let k1 = f(s, y)?;
    let k2 = f(s + 0.5 * h, &axpy(y, &k1, 0.5 * h))?;
    let k3 = f(s + 0.5 * h, &axpy(y, &k2, 0.5 * h))?;
    let k4 = f(s + h, &axpy(y, &k3, h))?;
    Ok((0..y.len()).map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect())
}

/// Classical RK4 through the given positions, starting from `y0` at `knots[0]`.
///
/// Every step is also taken as two half steps; the step fails when the
/// difference exceeds [`STEP_TOL`] (scaled by the solution size).
pub fn rk4_tabulate<F>(f: F, y0: &[f64], knots: &[f64]) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>>,
{
    let mut out = Vec::with_capacity(knots.len());
    out.push(y0.to_vec());
    for w in knots.windows(2) {
        let (s, h) = (w[0], w[1] - w[0]);
        let y = out.last().unwrap();
        let full = rk4_step(&f, s, y, h)?;
        let half = rk4_step(&f, s, y, 0.5 * h)?;
        let two = rk4_step(&f, s + 0.5 * h, &half, 0.5 * h)?;
        for (a, b) in full.iter().zip(&two) {
            let err = (a - b).abs() / 15.0;
            if !err.is_finite() || err > STEP_TOL * b.abs().max(1.0) {
                return Err(Error::Ode(format!(
                    "step rejected at sigma = {s}: local error estimate {err:e} exceeds {STEP_TOL:e}"
                )));
            }
        }
        out.push(two);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let knots: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        // each knot interval is two RK4 half steps, each multiplying by the quartic Taylor polynomial of e^h
        let amp = |h: f64| 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        let ys = rk4_tabulate(|_, y| Ok(vec![y[0]]), &[1.0], &knots).unwrap();
        assert!((ys[100][0] - amp(0.005).powi(200)).abs() < 1e-12);
        assert!((ys[100][0] - 1f64.exp()).abs() < 2e-11);
        let back: Vec<f64> = knots.iter().map(|k| -k).collect();
        let ys = rk4_tabulate(|_, y| Ok(vec![y[0]]), &[1.0], &back).unwrap();
        assert!((ys[100][0] - amp(-0.005).powi(200)).abs() < 1e-12);
        assert!((ys[100][0] - (-1f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn coarse_steps_are_rejected() {
        let knots = [0.0, 1.0, 2.0];
        assert!(matches!(rk4_tabulate(|_, y| Ok(vec![5.0 * y[0]]), &[1.0], &knots), Err(Error::Ode(_))));
    }
}
