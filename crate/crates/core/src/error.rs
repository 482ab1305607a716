use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("grid of size {grid} cannot resolve frequency {frequency} (need grid > 2 * frequency)")]
    Alias { grid: usize, frequency: u64 },

    #[error("series tag is `{found}`, operation requires `{required}`")]
    Tag {
        required: &'static str,
        found: &'static str,
    },

    #[error("division by zero: {0}")]
    DivideByZero(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("series diverges: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
