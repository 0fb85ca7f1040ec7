use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("index {index} out of range for dimension {dim}")]
    Bounds { index: usize, dim: usize },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("count error: {0}")]
    Count(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("photon number not conserved: input carries {input}, output carries {output}")]
    Conservation { input: usize, output: usize },

    #[error("outcome space of {outcomes} states exceeds the cap of {cap}")]
    Resource { outcomes: u128, cap: u128 },

    #[error("invalid state: {0}")]
    State(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("sample {sample} has zero likelihood under both hypotheses")]
    ImpossibleSample { sample: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
