//! Error type shared across the pipeline.
//!
//! Variants follow the failure classes the stages can hit; `exit_code`
//! groups them into the CLI's contract (1 usage/config, 2 data/format,
//! 3 provider/transport).

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path} is not valid UTF-8 at byte offset {offset}")]
    Decode { path: PathBuf, offset: usize },

    #[error("format error in {file} line {line}: {message}")]
    Format {
        file: String,
        line: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("word {word:?} not found in corpus")]
    WordNotFound { word: String },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("no token overlaps the target span [{start}, {end})")]
    Coverage { start: usize, end: usize },

    /// Zero-norm vector or constant rank vector; callers record these as
    /// skipped rather than treating them as pipeline failures.
    #[error("similarity undefined: {0}")]
    Undefined(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("protocol error: {0}")]
    Protocol(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(file: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code class for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Transport(_) | Error::Protocol(_) => 3,
            _ => 2,
        }
    }
}
