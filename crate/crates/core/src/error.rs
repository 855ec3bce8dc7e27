use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: relative error estimate {error:e} above tolerance {tolerance:e} after {evaluations} evaluations")]
    NonConvergence {
        error: f64,
        tolerance: f64,
        evaluations: usize,
    },

    #[error("invalid domain: {0}")]
    Domain(String),

    #[error(
        "potential kernel is infinite on the diagonal when sigma <= d/2 (d = {d}, sigma = {sigma})"
    )]
    DiagonalSingularity { d: u32, sigma: f64 },

    #[error("integral diverges: {0}")]
    NonIntegrable(String),

    #[error("parameters outside the regime of this construction: {0}")]
    ParamOutOfRegime(String),

    #[error("region R is only defined for sigma < d/2: {0}")]
    Regime(String),

    #[error("insufficient spread for calibration: {0}")]
    InsufficientSpread(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Numerical failures (as opposed to usage or regime errors).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::NonIntegrable(_))
    }
}
