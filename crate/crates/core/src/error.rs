use thiserror::Error;

/// Errors reported by the library, grouped by the contract they break.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller obligation was violated (non-prime modulus, inadmissible
    /// tuple fed to an operation that requires admissibility, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The request is valid but would exceed a configured memory or size
    /// budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Malformed textual input (tuple files, serialized bundles).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
