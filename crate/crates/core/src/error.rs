use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("matrices over different fields")]
    FieldMismatch,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid quiver: {0}")]
    Quiver(String),
    #[error("quiver has an oriented cycle through {0}")]
    Cyclic(String),
    #[error("underlying graph is not a tree: {0}")]
    NotTree(String),
    #[error("not a representation: {0}")]
    Rep(String),
    #[error("not a morphism: {0}")]
    Morphism(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
