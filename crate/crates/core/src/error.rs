use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergent { what: &'static str, iterations: usize },

    #[error("pole: {0}")]
    Pole(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("index set of size {requested} exceeds the configured cap {cap}")]
    Capacity { requested: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
