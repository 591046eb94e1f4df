use thiserror::Error;

/// Errors raised by the library. Advisory conditions (e.g. a series evaluated
/// below its convergence threshold) are reported in outputs, not here.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("convergence precondition violated: {0}")]
    Convergence(String),

    #[error("non-finite intermediate value in {0}")]
    NonFinite(String),

    #[error("tolerance not reached: {what} (estimate {estimate:.3e}, target {target:.3e})")]
    Tolerance {
        what: String,
        estimate: f64,
        target: f64,
    },

    #[error("product leaves the closed term algebra: {0}")]
    NotClosed(String),

    #[error("finite-difference step dominated by roundoff: {0}")]
    Differencing(String),

    #[error("no certificate found: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
