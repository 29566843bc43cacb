use thiserror::Error;

/// Errors raised by the algebra, the deciders and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expression leaves the supported class: {0}")]
    ExprClassOverflow(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid expression: {0}")]
    InvalidExpr(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("function is not continuous at t = {at}: left limit {left}, right limit {right}")]
    NotContinuous { at: f64, left: f64, right: f64 },
    #[error("F(z) = z identically: every real number is a fixed point")]
    DegenerateAllFixed,
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
