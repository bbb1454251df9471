use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::family::FamilyConfig;
use crate::error::{Error, Result, SolveError};

/// Uniform `(x, t)` grid; a count of 1 uses the lower end only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

fn axis(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 })
}

impl GridSpec {
    pub fn xs(&self) -> impl Iterator<Item = f64> {
        axis(self.x0, self.x1, self.nx)
    }

    pub fn ts(&self) -> impl Iterator<Item = f64> {
        axis(self.t0, self.t1, self.nt)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.nt == 0 {
            return Err(Error::Input("grid must have at least one point per axis".into()));
        }
        if ![self.x0, self.x1, self.t0, self.t1].iter().all(|v| v.is_finite()) {
            return Err(Error::Input("grid bounds must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    Broken,
    OutOfSupport,
}

impl PointStatus {
    pub fn of(e: &SolveError) -> Self {
        match e {
            SolveError::OutOfSupport { .. } | SolveError::NoBracket { .. } => PointStatus::OutOfSupport,
            _ => PointStatus::Broken,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PointStatus::Ok => "ok",
            PointStatus::Broken => "broken",
            PointStatus::OutOfSupport => "out-of-support",
        }
    }
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridRow {
    pub x: f64,
    pub t: f64,
    pub status: PointStatus,
    /// NaN unless the status is ok.
    pub u: Vec<f64>,
}

/// Evaluate on every grid point, `t` outer and `x` inner.
pub fn eval_grid(fc: &FamilyConfig, grid: &GridSpec) -> Result<Vec<GridRow>> {
    grid.validate()?;
    let n = fc.n();
    let mut rows = Vec::with_capacity(grid.nx * grid.nt);
    for t in grid.ts() {
        let mut guess = None;
        for x in grid.xs() {
            match fc.eval_solution_from(x, t, guess) {
                Ok((u, s)) => {
                    guess = Some(s + (grid.x1 - grid.x0) / grid.nx.max(2) as f64);
                    rows.push(GridRow { x, t, status: PointStatus::Ok, u });
                }
                Err(e) => {
                    guess = None;
                    rows.push(GridRow { x, t, status: PointStatus::of(&e), u: vec![f64::NAN; n] });
                }
            }
        }
    }
    Ok(rows)
}

/// CSV with header `x,t,status,u1..un` and 17 significant digits.
pub fn write_csv<W: Write>(rows: &[GridRow], n: usize, mut w: W) -> Result<()> {
    let mut header = String::from("x,t,status");
    for i in 1..=n {
        header.push_str(&format!(",u{i}"));
    }
    writeln!(w, "{header}")?;
    for r in rows {
        // adding 0.0 folds -0 into 0
        write!(w, "{:.16e},{:.16e},{}", r.x + 0.0, r.t + 0.0, r.status)?;
        for v in &r.u {
            if v.is_nan() {
                write!(w, ",NaN")?;
            } else {
                write!(w, ",{:.16e}", v + 0.0)?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}
