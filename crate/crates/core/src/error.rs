use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DgaError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("element is not homogeneous: {0}")]
    Inhomogeneous(String),

    #[error("not a cocycle: d = {0}")]
    NotCocycle(String),

    #[error("not a chain map at generator {0}")]
    NotChainMap(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, DgaError>;
