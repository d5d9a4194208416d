use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A hypothesis of the expansion does not hold for the input.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// The Hessian at the minimum is not positive definite.
    #[error("degenerate minimum: the expansion requires a nondegenerate, unique minimum ({0})")]
    Degenerate(String),

    /// Nonzero value or gradient at the expansion point.
    #[error("invalid minimum: {0}")]
    InvalidMinimum(String),

    /// The requested pathway does not apply to this input.
    #[error("pathway mismatch: {0}")]
    PathwayMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Quadrature failed to reach its tolerance; `best` is the last estimate.
    #[error("accuracy error: {message} (best estimate {best:e})")]
    Accuracy { message: String, best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
