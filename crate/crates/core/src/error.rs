use thiserror::Error;

/// Errors raised by the exact, sampling, and experiment layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exact integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("{what} = {value} exceeds the supported bound {bound}")]
    BoundExceeded { what: &'static str, value: u64, bound: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} needs {required:.3e} operations, budget is {budget:.3e}")]
    BudgetExceeded {
        what: &'static str,
        required: f64,
        budget: f64,
    },

    #[error("outside the paramagnetic regime (beta = {beta}, beta*J = {beta_j}); need beta < 1/2 and beta*J < 1/2")]
    RegimeViolation { beta: f64, beta_j: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix diagonal must be identically zero")]
    NotHollow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
