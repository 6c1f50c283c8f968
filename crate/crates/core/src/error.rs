use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// A point or multi-index has the wrong number of coordinates.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The operation needs a bounded domain.
    #[error("{op} requires a bounded domain")]
    Unbounded { op: &'static str },

    /// The integrand produced NaN or an infinity.
    #[error("non-finite integrand value {value} at point {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    /// The test function has no closed form for the requested operation.
    #[error("unsupported test function for {op}: {reason}")]
    Unsupported { op: &'static str, reason: String },

    /// Invalid combination of limit direction and prefactor.
    #[error("invalid limit case: {0}")]
    InvalidCase(String),

    /// Text descriptor could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Too many per-point failures in a sweep.
    #[error("study failed: {failed} of {total} points failed")]
    StudyFailed { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain_err(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        op,
        reason: reason.into(),
    }
}
