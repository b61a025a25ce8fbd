use thiserror::Error;

/// Errors raised by the numerical workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction parameter violated its precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The growth profile is constant where a nonconstant one is required.
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    Convergence { what: String, iterations: usize },

    /// The grid is too coarse for the discrete operator to keep its sign structure.
    #[error("discretization error: {0}")]
    Discretization(String),

    /// The time stepper left the invariant range [0, 1].
    #[error("scheme error: {0}")]
    Scheme(String),

    #[error("level {level} not attained by the field")]
    NoFront { level: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A verifier found no admissible points to check.
    #[error("coverage error: {0}")]
    Coverage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
