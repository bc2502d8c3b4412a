use thiserror::Error;

/// Errors raised by evaluation, sampling and fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical overflow evaluating {what} at {at}")]
    Overflow { what: &'static str, at: f64 },
    #[error("conditional law undefined: {0}")]
    UndefinedConditional(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("root bracket [{lo}, {hi}] does not change sign")]
    NoBracket { lo: f64, hi: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
