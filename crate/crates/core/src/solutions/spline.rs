use crate::error::{Error, EvalError, Result};
use crate::fieldfn::Scalar;

/// Interpolating cubic spline with not-a-knot end conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = knots.len();
        if n < 4 || values.len() != n {
            return Err(Error::Input(format!(
                "a spline needs at least 4 knots with one value each (got {n} knots, {} values)",
                values.len()
            )));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("spline knots must increase strictly and values be finite".into()));
        }
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|i| (values[i + 1] - values[i]) / h[i]).collect();
        // tridiagonal system for M_1..M_{n-2} with M_0, M_{n-1} eliminated
        let sz = n - 2;
        let mut sub = vec![0.0; sz];
        let mut diag = vec![0.0; sz];
        let mut sup = vec![0.0; sz];
        let mut rhs = vec![0.0; sz];
        for r in 0..sz {
            let i = r + 1;
            sub[r] = h[i - 1];
            diag[r] = 2.0 * (h[i - 1] + h[i]);
            sup[r] = h[i];
            rhs[r] = 6.0 * (d[i] - d[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        diag[0] = (h0 + h1) * (h0 + 2.0 * h1) / h1;
        sup[0] = (h1 * h1 - h0 * h0) / h1;
        let (a, b) = (h[n - 3], h[n - 2]);
        let last = sz - 1;
        sub[last] = (a * a - b * b) / a;
        diag[last] = (a + b) * (2.0 * a + b) / a;
        let inner = thomas(&sub, &diag, &sup, &rhs);
        let mut m = Vec::with_capacity(n);
        m.push(((h0 + h1) * inner[0] - h0 * inner[1]) / h1);
        m.extend_from_slice(&inner);
        m.push(((a + b) * inner[last] - b * inner[last - 1]) / a);
        Ok(Self { knots, values, m })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval<T: Scalar>(&self, s: T) -> Result<T, EvalError> {
        let sr = s.re();
        let (lo, hi) = self.support();
        let slack = 1e-12 * (hi - lo);
        if !(sr >= lo - slack && sr <= hi + slack) {
            return Err(EvalError::Domain { what: "outside data support", subexpr: format!("s = {sr}") });
        }
        let i = self.knots.partition_point(|&k| k <= sr).clamp(1, self.knots.len() - 1) - 1;
        let h = self.knots[i + 1] - self.knots[i];
        let a = (T::cst(self.knots[i + 1]) - s).scale(1.0 / h);
        let b = (s - T::cst(self.knots[i])).scale(1.0 / h);
        let cubic = |w: T| w * w * w - w;
        Ok(a.scale(self.values[i])
            + b.scale(self.values[i + 1])
            + (cubic(a).scale(self.m[i]) + cubic(b).scale(self.m[i + 1])).scale(h * h / 6.0))
    }
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / den } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
