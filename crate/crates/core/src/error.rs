use std::path::PathBuf;

/// Errors produced by the inventory simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no observations")]
    NoObservations,

    #[error("lognormal requires positive mean")]
    NonPositiveMean,

    #[error("demand stream has {actual} days, expected {expected}")]
    HorizonMismatch { expected: usize, actual: usize },

    #[error("batch larger than sample")]
    BatchTooLarge,

    #[error("degenerate series")]
    DegenerateSeries,

    #[error("series too short: need at least {required} values, got {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("paired comparison requires common random numbers")]
    PairingRequiresCrn,

    #[error("empty search space")]
    EmptySearchSpace,

    #[error("kernel matrix is not positive definite even with jitter {0:e}")]
    SingularKernel(f64),

    #[error("{path}: row {row}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
