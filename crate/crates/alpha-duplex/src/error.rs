use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration failed to converge.
    #[error("computation failed to converge after {terms} terms: {what}")]
    NoConvergence { what: String, terms: usize },

    /// Adaptive quadrature ran out of subdivision depth. Carries the best
    /// estimate and its error bound so callers can decide whether to accept.
    #[error("quadrature depth exhausted: estimate {estimate} with error bound {error_bound}")]
    QuadratureDepth { estimate: f64, error_bound: f64 },

    /// Configuration file problems, with field-level context.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
