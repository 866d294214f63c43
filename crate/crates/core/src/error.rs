use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computation broke down (singular denominator, non-finite value).
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Exact integer arithmetic left the i64 range.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn numeric<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Numeric(msg.into()))
}
