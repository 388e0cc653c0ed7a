use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("truncation did not converge below n_max = {ceiling}: {detail}")]
    TruncationNotConverged { ceiling: usize, detail: String },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("eigenpair residual {residual:.3e} exceeds bound {bound:.3e} (index {index})")]
    Residual { index: usize, residual: f64, bound: f64 },

    #[error("coupling is below the critical point (4 lambda^2 / (hbar w0 E_q) = {ratio:.6})")]
    Subcritical { ratio: f64 },

    #[error("target not bracketed: {0}")]
    NotBracketed(String),

    #[error("time-step refinement did not converge: {0}")]
    StepRefinement(String),

    #[error("measurement outcome has zero probability")]
    ZeroProbability,

    #[error("{context}: {source}")]
    AtCoupling {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Wraps an error with the coupling value that triggered it.
    pub(crate) fn at_lambda(self, lambda: f64) -> Self {
        Error::AtCoupling { context: format!("at lambda = {lambda}"), source: Box::new(self) }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InvalidParameter(_) | Error::DimensionMismatch { .. } | Error::Subcritical { .. } => false,
            Error::AtCoupling { source, .. } => source.is_numerical(),
            _ => true,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
