use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must share structure (players, action sets, tables) do not.
    #[error("shape error: {0}")]
    Shape(String),

    /// A required oracle, grid or option is missing.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("root finding failed: {0}")]
    RootFind(#[from] crate::rootfind::RootFindError),

    /// A grid search found no point satisfying its membership test.
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("experiment failed on trajectory {trajectory} at step {step}: {source}")]
    Experiment {
        trajectory: String,
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Exit status the CLI reports for this error: 2 for input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Config(_) | Error::Shape(_) | Error::Domain(_) => 2,
            Error::Io(_) | Error::Json(_) => 2,
            Error::Convergence { .. }
            | Error::RootFind(_)
            | Error::Resolution(_)
            | Error::Experiment { .. } => 3,
            Error::Step { source, .. } => source.exit_code(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Shape(_) => "shape",
            Error::Config(_) => "config",
            Error::Convergence { .. } => "convergence",
            Error::RootFind(_) => "root_find",
            Error::Resolution(_) => "resolution",
            Error::Parse { .. } => "parse",
            Error::Experiment { .. } => "experiment",
            Error::Step { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
