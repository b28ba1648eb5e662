use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Floating point payloads are stored as `f64` regardless of the scalar the
/// computation ran in, so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("`{name}` = {value} is outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("operation requires the {expected} channel model")]
    ModelMismatch { expected: &'static str },

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error}")]
    Quadrature { estimate: f64, error: f64 },

    #[error(
        "target success probability {target} is unreachable: best {achieved} at {molecules} molecules"
    )]
    Unachievable {
        target: f64,
        achieved: f64,
        molecules: f64,
    },

    #[error("{requested} samples exceed the accumulator capacity of {capacity}")]
    Capacity { requested: u64, capacity: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
