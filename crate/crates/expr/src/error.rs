use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("no value bound for symbol `{0}`")]
    Unbound(String),
    #[error("outside the real domain: {0}")]
    Domain(String),
    #[error("not polynomial in the collection variables: {0}")]
    NonPolynomial(String),
    #[error("invalid expression json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, ExprError>;
