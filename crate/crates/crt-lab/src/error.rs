use thiserror::Error;

/// Errors produced by the simulators, the test engine, and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The observed (choice, reward) pair has zero probability under both
    /// stimulus values, so no posterior exists. Reachable only with
    /// degenerate reward probabilities.
    #[error("inconsistent observation: {0}")]
    InconsistentObservation(String),

    /// A simulated trial exceeded the per-trial press cap.
    #[error("simulation overflow: {0}")]
    SimulationOverflow(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resample {index} failed: {source}")]
    Resample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("session {index} failed: {source}")]
    Session {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn at_resample(self, index: usize) -> Self {
        Error::Resample {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_session(self, index: usize) -> Self {
        Error::Session {
            index,
            source: Box::new(self),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Process exit code: 1 for configuration errors, 2 for runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            _ => 2,
        }
    }
}
