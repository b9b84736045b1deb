use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid world: {0}")]
    InvalidWorld(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid node pair ({s}, {t}): {reason}")]
    InvalidPair {
        s: usize,
        t: usize,
        reason: &'static str,
    },

    #[error(
        "graph has {uncertain} uncertain edges, exact enumeration is capped at {cap} \
         (2^{uncertain} worlds)"
    )]
    CapExceeded { uncertain: usize, cap: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
