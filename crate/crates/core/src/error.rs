use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series is not invertible: constant term is zero")]
    NotInvertible,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("value {what} is not an integer after scaling")]
    NonIntegral { what: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("precision of {0} bits is below the supported minimum")]
    PrecisionTooLow(u32),

    #[error("could not reach the requested precision: {0}")]
    PrecisionUnreachable(String),

    #[error("linear form residual {residual} exceeds threshold 2^-{threshold_bits}")]
    Inconsistent {
        residual: String,
        threshold_bits: u32,
    },

    #[error("Nesterenko criterion inapplicable: {0}")]
    CriterionInapplicable(String),

    #[error("scan cap of {0} exceeded")]
    ScanCap(u64),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
