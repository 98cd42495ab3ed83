use thiserror::Error;

/// Errors raised by the solvers and the configuration layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate coupling: {0}")]
    DegenerateCoupling(String),

    #[error("wrong number of magnon modes: expected {expected}, found {found}")]
    ModeCount { expected: usize, found: usize },

    #[error("root finder failed to converge; polynomial coefficients (ascending) = {coeffs:?}")]
    RootNonConvergence { coeffs: Vec<f64> },

    #[error("singular point: {0}")]
    Singular(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("complex polariton frequency (overdamped regime): discriminant = {0:e}")]
    ComplexFrequency(f64),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
