use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result does not fit in an `f64`.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("no convergence: {what} (estimated error {estimate:.3e})")]
    Convergence { what: String, estimate: f64 },

    /// A request exceeds a configured resource budget.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Malformed input data.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
