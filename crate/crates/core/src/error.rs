use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("self-loop at vertex `{0}`")]
    SelfLoop(String),
    #[error("vertex set does not span a full subgraph: {0}")]
    NotFull(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("size limit exceeded: {what} is {actual}, bound is {bound}")]
    BoundExceeded {
        what: &'static str,
        actual: usize,
        bound: usize,
    },
    #[error("({set}, {multiplier}) is not a well-defined Whitehead automorphism: {reason}")]
    NotWellDefined {
        set: String,
        multiplier: String,
        reason: String,
    },
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(i64),
    #[error("quotient map does not respect relator {0}")]
    RelatorNotRespected(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
