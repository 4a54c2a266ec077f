use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex `{0}` appears in both the source and target columns of a typed edge list")]
    TypeConflict(String),

    #[error("edge list is empty")]
    EmptyGraph,

    #[error("graph has zero total edge weight")]
    ZeroWeight,

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Evaluation(String),

    #[error("malformed embedding file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
