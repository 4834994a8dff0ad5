use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A request exceeds the supported qubit width or tomography size.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// A circuit op failed validation; `position` is the index it would have had.
    #[error("circuit build error at op {position}: {reason}")]
    Build { position: usize, reason: String },

    /// An operation was handed something outside its contract (e.g. measurements
    /// passed to unitary extraction).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("post-selection of qubit {qubit} onto |{outcome}> has probability {probability:e}")]
    ImpossibleBranch {
        qubit: usize,
        outcome: u8,
        probability: f64,
    },

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("invalid coupling map: {0}")]
    Validation(String),

    #[error("incomplete tomography data: {0}")]
    IncompleteData(String),

    #[error("calibration matrix is ill-conditioned (condition number {0:e})")]
    Conditioning(f64),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
