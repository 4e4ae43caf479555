//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of evaluation, verification and quadrature.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("argument error: {0}")]
    Argument(String),
    /// The function is not defined (or deliberately excluded) at a point.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested zeta regime does not apply to the given parameters.
    #[error("regime error: {0}")]
    Regime(String),
    /// A series or iteration failed to reach the requested tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// Adaptive quadrature exhausted its refinement budget.
    #[error("quadrature error: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
