//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at (or too near) a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// Operation requires a primitive character.
    #[error("character {0} is not primitive")]
    NotPrimitive(String),

    /// Modulus exceeds the table-construction bound.
    #[error("modulus {0} exceeds the supported bound {1}")]
    ModulusTooLarge(u64, u64),

    /// Enumeration budget exceeded.
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    /// Malformed external identifier or parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn pole(msg: impl Into<String>) -> Self {
        Error::Pole(msg.into())
    }
}
