//! Systems from the literature used as fixtures.

use super::JordanSystem;
use crate::error::Result;

/// `u¹_t = u²u¹_x + u²_x`, `u²_t = u²u²_x`.
pub fn canonical() -> JordanSystem {
    JordanSystem::from_exprs(&[&["u2", "1"]], &[]).expect("valid fixture")
}

/// A 2×2 block whose eigenvalue depends on the block's first variable.
pub fn counterexample() -> JordanSystem {
    JordanSystem::from_exprs(&[&["u1", "1"]], &[]).expect("valid fixture")
}

/// First WDVV flow in Toeplitz variables.
pub fn wdvv_t() -> JordanSystem {
    JordanSystem::from_exprs(&[&["u2", "-u1", "0"]], &[]).expect("valid fixture")
}

/// Second WDVV flow in Toeplitz variables.
pub fn wdvv_s() -> JordanSystem {
    JordanSystem::from_exprs(&[&["-0.5*u2^2", "u1*u2", "u1^2"]], &[]).expect("valid fixture")
}

pub const HARD_ROD_LAMBDA1: &str = "-(u3*u2 + a*u4)/(u3 + a)";
pub const HARD_ROD_MU1: &str = "(u1*u3 - a^2)/(u3 + a)";
pub const HARD_ROD_LAMBDA2: &str = "-(u1*u4 + a*u2)/(u1 + a)";
pub const HARD_ROD_MU2: &str = "(u1*u3 - a^2)/(u1 + a)";

/// Delta-functional reduction of the hard-rod kinetic equation, rod length `a`.
pub fn hard_rod(a: f64) -> Result<JordanSystem> {
    JordanSystem::from_exprs(
        &[&[HARD_ROD_LAMBDA1, HARD_ROD_MU1], &[HARD_ROD_LAMBDA2, HARD_ROD_MU2]],
        &[("a", a)],
    )
}

/// Named catalog: `(name, system, linearly degenerate?)`.
pub fn all() -> Vec<(&'static str, JordanSystem, bool)> {
    vec![
        ("canonical", canonical(), true),
        ("wdvv-t", wdvv_t(), true),
        ("wdvv-s", wdvv_s(), true),
        ("hard-rod", hard_rod(1.0).expect("valid fixture"), true),
        ("counterexample", counterexample(), false),
    ]
}

pub fn by_name(name: &str) -> Option<JordanSystem> {
    all().into_iter().find(|(n, _, _)| *n == name).map(|(_, s, _)| s)
}
