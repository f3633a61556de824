use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("arity error: expected {expected} parameters, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("numeric error in {phase} phase at iteration {iteration}: {detail}")]
    Numeric {
        phase: &'static str,
        iteration: usize,
        detail: String,
    },

    #[error("energy function evaluated at its pole (x equals the stable point)")]
    Pole,

    #[error("config error: {0}")]
    Config(String),

    #[error("refusing to write an empty record set")]
    EmptyInput,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by floating-point breakdown rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric { .. } | Error::Pole)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
