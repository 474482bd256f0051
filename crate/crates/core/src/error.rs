//! Error types shared across the toolkit.

use std::fmt;
use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// File could not be read or written.
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A line of an input file could not be parsed.
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    /// The graph holds no edges (possibly after self-loop removal or filtering).
    EmptyGraph,
    /// Ground truth does not cover these node labels.
    MissingLabels(Vec<String>),
    /// Matrix shapes do not line up for an operation.
    DimensionMismatch {
        context: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// A solver or experiment configuration value violates its domain.
    InvalidConfig(String),
    /// A parameter of a generator or metric is out of range.
    InvalidParameter(String),
    /// The objective became non-finite during iteration.
    NonFiniteObjective { iteration: usize, value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            Error::Parse {
                path,
                line,
                message,
            } => write!(f, "{}:{}: {}", path.display(), line, message),
            Error::EmptyGraph => write!(f, "graph has no edges"),
            Error::MissingLabels(labels) => {
                write!(f, "ground truth missing labels for nodes: {}", labels.join(", "))
            }
            Error::DimensionMismatch {
                context,
                expected,
                got,
            } => write!(
                f,
                "{}: expected {}x{} matrix, got {}x{}",
                context, expected.0, expected.1, got.0, got.1
            ),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {}", msg),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {}", msg),
            Error::NonFiniteObjective { iteration, value } => write!(
                f,
                "objective became non-finite at iteration {} (value {})",
                iteration, value
            ),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
