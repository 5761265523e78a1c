use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("shape error: {0}")]
    ShapeError(String),
    #[error("level error: {0}")]
    LevelError(String),
    #[error("tower is not certified strict: {0}")]
    NotStrict(String),
    #[error("tower not recognized in Prod_omega: {0}")]
    NotInProdOmega(String),
    #[error("window error: {0}")]
    WindowError(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
