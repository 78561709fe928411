use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group of size {size} exceeds the enumeration bound {bound}")]
    Capacity { size: u128, bound: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "invalid endomorphism: entry ({row},{col}) = {value} times order {col_order} is not divisible by {row_order}"
    )]
    InvalidEndo {
        row: usize,
        col: usize,
        value: u64,
        row_order: u64,
        col_order: u64,
    },

    #[error("division by a vanishing value: {0}")]
    Division(String),

    #[error("window too small: {0}")]
    Margin(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cannot construct: {0}")]
    CannotConstruct(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
