use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order mismatch: {0}")]
    OrderMismatch(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("singular leading term: {0}")]
    SingularLeadingTerm(String),
    #[error("series has negative q-exponent {0}; not holomorphic at the cusp")]
    NotHolomorphicAtCusp(String),
    #[error("singular sector {sector}: {detail}")]
    SingularSector { sector: String, detail: String },
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integer overflow in exact arithmetic ({0})")]
    Overflow(&'static str),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
