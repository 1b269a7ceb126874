use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates one of the model invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// A caller-supplied argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change of {quantity} over [{lo}, {hi}]")]
    NoSignChange { quantity: String, lo: f64, hi: f64 },

    #[error("stationary solve is singular (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("unknown {kind} '{name}' (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("invalid sweep spec: {0}")]
    Spec(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by model or argument validation rather than
    /// by input/output or malformed configuration.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_) | Error::InvalidArgument(_) | Error::NoSignChange { .. }
        )
    }
}
