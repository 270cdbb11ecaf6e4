use thiserror::Error;

/// Errors raised by the pricing and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("inner optimizer did not converge at time slice {slice}, state x = {x}, aux = {aux}: {reason}")]
    InnerOptimizer {
        slice: usize,
        x: f64,
        aux: f64,
        reason: String,
    },

    #[error("policy iteration did not converge after {sweeps} sweeps at time step {step} (residual {residual:e})")]
    PolicyIteration {
        step: usize,
        sweeps: usize,
        residual: f64,
    },

    #[error("explicit scheme unstable: dt = {dt:e} exceeds dx^2/(sigma^2 y_max) = {limit:e}")]
    Unstable { dt: f64, limit: f64 },

    #[error("{excluded} of {total} Monte Carlo paths returned non-finite values")]
    TooManyExclusions { excluded: usize, total: usize },

    #[error("payoff `{0}` is not supported by this solver")]
    UnsupportedPayoff(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
