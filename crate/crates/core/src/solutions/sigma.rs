use super::family::FamilyConfig;
use super::root::newton_bisect;
use crate::error::{EvalError, SolveError};
use crate::fieldfn::{Dual, Point};

/// Sign-change scan resolution.
pub const SCAN_CELLS: usize = 64;
const SPEED_SAMPLES: usize = 65;

fn eval_err(e: EvalError) -> SolveError {
    match e {
        EvalError::Domain { what: "outside data support", .. } => SolveError::OutOfSupport { sigma: f64::NAN },
        EvalError::Singular(m) => SolveError::Blowup(m),
        e => SolveError::Eval(e),
    }
}

impl FamilyConfig {
    /// `g(σ) = X(σ, t) − x` and `∂g/∂σ`.
    fn residual(&self, s: f64, x: f64, t: f64) -> Result<(f64, f64), EvalError> {
        let d = self.char_x(Dual::var(s), Dual::constant(t))?;
        Ok((d.re - x, d.eps))
    }

    /// Largest characteristic speed of the data over `[lo, hi]`.
    fn max_speed(&self, lo: f64, hi: f64) -> f64 {
        let sys = self.system();
        let mut v: f64 = 0.0;
        for i in 0..SPEED_SAMPLES {
            let s = lo + (hi - lo) * i as f64 / (SPEED_SAMPLES - 1) as f64;
            let Ok(u) = self.fields_at(s, 0.0) else { continue };
            if let Ok(l) = sys.eigenvalues(&Point::new(0.0, s, u)) {
                v = l.iter().filter(|x| x.is_finite()).fold(v, |m, x| m.max(x.abs()));
            }
        }
        v
    }

    /// Search window `[x − S, x + S]` clipped to the data support, and whether it was clipped.
    fn window(&self, x: f64, t: f64) -> (f64, f64, bool) {
        let (slo, shi) = self.support();
        let mut half = 2.0 * t.abs();
        // grow until the speed bound is self-consistent
        for _ in 0..8 {
            let v = self.max_speed((x - half).max(slo), (x + half).min(shi));
            let next = 2.0 * t.abs() * (1.0 + v);
            if next <= half {
                break;
            }
            half = next;
        }
        let (lo, hi) = (x - half, x + half);
        (lo.max(slo), hi.min(shi), lo < slo || hi > shi)
    }

    /// Characteristic label of `(x, t)`.
    pub fn solve_sigma(&self, x: f64, t: f64) -> Result<f64, SolveError> {
        self.solve_sigma_from(x, t, None)
    }

    /// As [`FamilyConfig::solve_sigma`], starting Newton from `guess` when it lies in the bracket.
    pub fn solve_sigma_from(&self, x: f64, t: f64, guess: Option<f64>) -> Result<f64, SolveError> {
        let (slo, shi) = self.support();
        if t == 0.0 {
            if x < slo || x > shi {
                return Err(SolveError::OutOfSupport { sigma: x });
            }
            return Ok(x);
        }
        let (lo, hi, clipped) = self.window(x, t);
        if !(lo < hi) {
            return Err(SolveError::OutOfSupport { sigma: x });
        }
        let mut samples = Vec::with_capacity(SCAN_CELLS + 1);
        for i in 0..=SCAN_CELLS {
            let s = lo + (hi - lo) * i as f64 / SCAN_CELLS as f64;
            samples.push((s, self.residual(s, x, t).ok()));
        }
        let mut brackets = Vec::new();
        let mut folded = None;
        for w in samples.windows(2) {
            if let (Some((g0, d0)), Some((g1, _))) = (w[0].1, w[1].1) {
                if d0 <= 0.0 {
                    folded = Some(d0);
                }
                if g0 == 0.0 || (g1 != 0.0 && g0.signum() != g1.signum()) {
                    brackets.push((w[0].0, w[1].0, g0));
                }
            }
        }
        if let Some(&(s, Some((g, d)))) = samples.last() {
            if d <= 0.0 {
                folded = Some(d);
            }
            if g == 0.0 {
                brackets.push((s, s, g));
            }
        }
        match brackets.len() {
            0 => {
                if let Some(x_sigma) = folded {
                    Err(SolveError::Breaking { x, t, x_sigma })
                } else if clipped {
                    Err(SolveError::OutOfSupport { sigma: x })
                } else {
                    Err(SolveError::NoBracket { x, t })
                }
            }
            1 => {
                let (a, b, ga) = brackets[0];
                if ga == 0.0 {
                    return self.accept(a, x, t);
                }
                let tol = 1e-12 * x.abs().max(1.0);
                let s = newton_bisect(|s| self.residual(s, x, t), a, b, ga, guess, tol)?;
                self.accept(s, x, t)
            }
            _ => {
                let x_sigma = folded.unwrap_or(f64::NAN);
                Err(SolveError::Breaking { x, t, x_sigma })
            }
        }
    }

    fn accept(&self, s: f64, x: f64, t: f64) -> Result<f64, SolveError> {
        let (_, x_sigma) = self.residual(s, x, t).map_err(eval_err)?;
        if !(x_sigma > 0.0) {
            return Err(SolveError::Breaking { x, t, x_sigma });
        }
        Ok(s)
    }

    /// Field values at characteristic label `σ` and time `t`.
    pub fn eval_at_sigma(&self, s: f64, t: f64) -> Result<Vec<f64>, SolveError> {
        self.fields_at(s, t).map_err(eval_err)
    }

    /// `u(x, t)`.
    pub fn eval_solution(&self, x: f64, t: f64) -> Result<Vec<f64>, SolveError> {
        self.eval_solution_from(x, t, None).map(|(u, _)| u)
    }

    /// `u(x, t)` and the label used, with an optional warm-start guess.
    pub fn eval_solution_from(&self, x: f64, t: f64, guess: Option<f64>) -> Result<(Vec<f64>, f64), SolveError> {
        let s = self.solve_sigma_from(x, t, guess)?;
        Ok((self.eval_at_sigma(s, t)?, s))
    }
}
