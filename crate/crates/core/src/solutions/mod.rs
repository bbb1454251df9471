//! Exact solution families, their characteristic solver and closure ODEs.

mod closure;
mod data;
mod family;
mod fixtures;
mod grid;
mod ode;
mod root;
mod sigma;
mod spline;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use closure::{close_initial_data, produced_slots, ClosureReport, ClosureSpec};
pub use data::{DataFn, InitialData};
pub use fixtures::{fixture, fixture_json};
pub use family::{constraint_field, FamilyConfig, FamilyKind, Params, Variant};
pub use grid::{eval_grid, write_csv, GridRow, GridSpec, PointStatus};
pub use ode::{rk4_tabulate, STEP_TOL};
pub use root::newton_bisect;
pub use sigma::SCAN_CELLS;
pub use spline::CubicSpline;

use crate::error::{Error, Result};
use crate::fieldfn::ScalarField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Expr(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureDescriptor {
    pub produce: Vec<String>,
    pub sigma_range: [f64; 2],
    pub step: f64,
    /// Keys like `"u02(0)"`.
    pub anchors: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InitialDataDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureDescriptor>,
    #[serde(flatten)]
    pub fields: BTreeMap<String, String>,
}

/// JSON form of a family configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDescriptor {
    pub family: FamilyKind,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    pub initial_data: InitialDataDescriptor,
}

fn slot_name(name: &str, n: usize) -> Result<usize> {
    let i = name
        .strip_prefix("u0")
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&i| i >= 1 && i <= n)
        .ok_or_else(|| Error::Input(format!("'{name}' is not an initial datum u01..u0{n}")))?;
    Ok(i - 1)
}

fn anchor_key(key: &str, n: usize) -> Result<(usize, f64)> {
    let bad = || Error::Input(format!("anchor key '{key}' must look like u02(0)"));
    let (name, rest) = key.split_once('(').ok_or_else(bad)?;
    let s = rest.strip_suffix(')').ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?;
    Ok((slot_name(name.trim(), n)?, s))
}

impl FamilyDescriptor {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Parse parameters and data; runs the closure when one is requested.
    pub fn build(&self) -> Result<(FamilyConfig, Option<ClosureReport>)> {
        let kind = self.family;
        let n = kind.n();
        let mut params = Params::default();
        for (k, v) in &self.params {
            if let ParamValue::Number(x) = v {
                if !x.is_finite() {
                    return Err(Error::Input(format!("parameter {k} must be finite")));
                }
                params.numbers.insert(k.clone(), *x);
            }
        }
        for (k, v) in &self.params {
            if let ParamValue::Expr(src) = v {
                let f = ScalarField::from_source(src, n, &params.numbers)?;
                match k.as_str() {
                    "f1" => params.f1 = Some(f),
                    "c1" => params.c1 = Some(f),
                    _ => return Err(Error::Input(format!("unknown function parameter '{k}' (expected f1 or c1)"))),
                }
            }
        }
        let mut data = InitialData::new(n);
        for (name, src) in &self.initial_data.fields {
            let i = slot_name(name, n)?;
            data.set(i, DataFn::expr(ScalarField::from_source(src, 0, &params.numbers)?)?);
        }
        match &self.initial_data.closure {
            None => Ok((FamilyConfig::new(kind, self.variant, params, data)?, None)),
            Some(c) => {
                let produce = c.produce.iter().map(|p| slot_name(p, n)).collect::<Result<Vec<_>>>()?;
                let mut anchor = None;
                let mut anchors = Vec::new();
                for (key, &v) in &c.anchors {
                    let (i, s) = anchor_key(key, n)?;
                    if anchor.is_some_and(|a| a != s) {
                        return Err(Error::Input("all closure anchors must share one label s".into()));
                    }
                    anchor = Some(s);
                    anchors.push((i, v));
                }
                let spec = ClosureSpec {
                    produce,
                    sigma_range: (c.sigma_range[0], c.sigma_range[1]),
                    step: c.step,
                    anchor: anchor.unwrap_or(c.sigma_range[0]),
                    anchors,
                };
                let (fc, report) = close_initial_data(kind, self.variant, params, data, &spec)?;
                Ok((fc, Some(report)))
            }
        }
    }
}

impl FamilyConfig {
    pub fn from_json(s: &str) -> Result<(Self, Option<ClosureReport>)> {
        FamilyDescriptor::from_json(s)?.build()
    }
}
