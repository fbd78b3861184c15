use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient length: need {needed} letters, word has {available}")]
    InsufficientLength { needed: usize, available: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("word is not in the image subgroup")]
    NotInImage,

    #[error("too large: {0}")]
    TooLarge(String),

    #[error("no decomposition scheme: {0}")]
    NoScheme(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("cap exceeded: {0}")]
    CapExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
