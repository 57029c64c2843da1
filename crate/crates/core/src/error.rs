use thiserror::Error;

/// Errors raised by the procedures and model constructors in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("p-value at index {index} is outside [0, 1]: {value}")]
    PValueOutOfRange { index: usize, value: f64 },

    #[error("threshold family is not nondecreasing at rank {rank}: {previous} > {current}")]
    NotMonotone {
        rank: usize,
        previous: f64,
        current: f64,
    },

    #[error(
        "subset enumeration needs {required} evaluations (limit {limit}); \
         use the streamlined step-down variant instead"
    )]
    EnumerationLimit { required: u128, limit: u128 },

    #[error("subset-indexed family violates the non-increasing condition: {0}")]
    NonIncreasingViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Checks that a nominal level lies strictly inside (0, 1).
pub(crate) fn check_level(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in (0, 1), got {value}")))
    }
}
