use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdent { name: String, offset: usize },
    #[error("'{ident}' at byte {offset} exceeds the field arity {arity}")]
    Arity { ident: String, arity: usize, offset: usize },
    #[error("function '{func}' at byte {offset} takes {expected} argument(s), got {got}")]
    FuncArgs { func: String, expected: usize, got: usize, offset: usize },
}

/// Failures while evaluating a numeric quantity at a point.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("domain error ({what}) in '{subexpr}'")]
    Domain { what: &'static str, subexpr: String },
    #[error("not differentiable at this point: '{subexpr}'")]
    NonDifferentiable { subexpr: String },
    #[error("point has {got} field values, expected at least {expected}")]
    Arity { expected: usize, got: usize },
    #[error("quadrature on [{a}, {b}] did not converge")]
    Quadrature { a: f64, b: f64 },
    #[error("singular locus: {0}")]
    Singular(String),
}

/// Failures of the characteristic solver and the solution formulas.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("no sign change of the characteristic relation near x={x}, t={t}")]
    NoBracket { x: f64, t: f64 },
    #[error("characteristics have crossed at x={x}, t={t} (x_sigma={x_sigma})")]
    Breaking { x: f64, t: f64, x_sigma: f64 },
    #[error("sigma={sigma} is outside the support of the initial data")]
    OutOfSupport { sigma: f64 },
    #[error("solution blows up: {0}")]
    Blowup(String),
    #[error("root iteration did not converge (residual {residual})")]
    NotConverged { residual: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse '{src}': {source}")]
    Parse { src: String, source: ParseError },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("closure ODE: {0}")]
    Ode(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 input, 3 numeric domain, 4 precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Input(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::Eval(_) | Error::Solve(_) | Error::Ode(_) => 3,
            Error::Precondition(_) => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
