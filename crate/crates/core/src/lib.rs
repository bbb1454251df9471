//! Linearly degenerate Jordan-block systems of hydrodynamic type.

pub mod cli;
pub mod constraints;
pub mod error;
pub mod fieldfn;
pub mod hamiltonian;
pub mod solutions;
pub mod systems;
pub mod verify;

pub use error::{Error, EvalError, ParseError, Result, SolveError};
