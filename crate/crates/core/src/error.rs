use thiserror::Error;

/// Errors raised across the fitting pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("parse error at line {line}, column {column}: invalid number {token:?}")]
    Parse {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("need at least {required} values, got {got}")]
    TooFew { required: usize, got: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("invalid bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: u128, cap: u128 },

    #[error("size error: {0}")]
    Size(String),

    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}
