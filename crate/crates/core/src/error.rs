use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{0}: file contains no series")]
    EmptyFile(PathBuf),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("unknown method `{name}` (supported: {supported})")]
    UnknownMethod { name: String, supported: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("input too short: need at least {required} samples, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("spectrum violates conjugate symmetry at bin {bin}")]
    NotHermitian { bin: usize },

    #[error("warp path does not match series lengths")]
    PathMismatch,

    #[error("exhaustive DTW is limited to lengths <= {limit}, got {n}x{m}")]
    OracleTooLarge { limit: usize, n: usize, m: usize },

    #[error("no admissible warp path after {0} waypoint draws")]
    NoAdmissiblePath(usize),

    #[error("class `{0}` has no usable partner series")]
    EmptyPool(String),

    #[error("baseline `{baseline}` missing for dataset `{dataset}`")]
    MissingBaseline { baseline: String, dataset: String },
}

impl Error {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::UnknownMethod { .. } => 2,
            Self::Io { .. } | Self::MalformedRow { .. } | Self::EmptyFile(_) => 3,
            _ => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
