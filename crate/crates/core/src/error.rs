use std::path::PathBuf;

use thiserror::Error;

use crate::bigraph::Selection;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("density is undefined for a selection with an empty side")]
    UndefinedDensity,

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The greedy heuristic could not produce a quasi-biclique. `last` is the
    /// last state before the failing step.
    #[error("greedy heuristic failed after {steps} step(s): {reason}")]
    HeuristicFailure {
        reason: String,
        steps: usize,
        last: Selection,
    },

    #[error("refused: {0}")]
    Refused(String),

    #[error("unsupported model form: {0}")]
    Unsupported(String),

    #[error("solver adapter: {message}")]
    Solver { message: String, output: String },

    #[error("verification failed on constraint `{constraint}`: {detail}")]
    Verification { constraint: String, detail: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn arg(message: impl Into<String>) -> Self {
        Error::Argument(message.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
