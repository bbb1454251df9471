//! Scalar fields over `(t, x, u)`: dual numbers, expressions, quadrature.

pub mod dual;
pub mod expr;
pub mod field;
pub mod quad;

pub use dual::{Dual, Scalar};
pub use expr::{Expr, Var};
pub use field::{parse_expression, Field, GenericField, Gradient, Point, ScalarField};
pub use quad::{integrate, integrate_u1};
