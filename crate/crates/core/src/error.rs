use std::path::PathBuf;

/// Crate-wide error type. Variants carry enough context to name the
/// offending quantity or config key.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A geometric query was degenerate (e.g. coincident points).
    #[error("degenerate geometry: {0}")]
    Geometry(String),

    /// A statistic needed more events than the data provided.
    #[error("insufficient events: need at least {need}, got {got}")]
    InsufficientEvents { need: usize, got: usize },

    /// A configuration value failed validation; `key` names the field.
    #[error("config `{key}`: {reason}")]
    Config { key: String, reason: String },

    /// A data file could not be parsed.
    #[error("parse error in {what}: {reason}")]
    Parse { what: String, reason: String },

    /// A filesystem path could not be read or written.
    #[error("{path}: {source}")]
    Path {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A failure attributed to one scenario of a sweep.
    #[error("scenario `{id}`: {source}")]
    Scenario {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::Config { key: key.to_string(), reason: reason.into() }
    }

    /// True for errors produced while loading or validating inputs, as
    /// opposed to failures during a run.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } | Error::Parse { .. } | Error::Path { .. } => true,
            Error::Scenario { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
