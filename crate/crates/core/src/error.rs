use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation was called with an incompatible protocol or shape.
    #[error("usage error: {0}")]
    Usage(String),
    /// A configured size limit would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A computed quantity violated an invariant beyond tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),
}
