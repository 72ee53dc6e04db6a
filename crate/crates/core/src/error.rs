use thiserror::Error;

/// Errors raised by the simulator, the quadrature engine and the report layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A caller-side contract was broken (non-complete measurement, negative density, ...).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Doubling the quadrature resolution moved a reported scalar by more than the limit.
    #[error("quadrature did not converge: `{quantity}` shifted by {shift:e} on node doubling (limit {limit:e})")]
    Convergence {
        quantity: String,
        shift: f64,
        limit: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
