use std::path::PathBuf;

use crate::series::Unit;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unit mismatch: expected {expected}, found {found}")]
    UnitMismatch { expected: Unit, found: Unit },

    #[error("year {year}: value {value} is not allowed ({reason})")]
    InvalidValue {
        year: i32,
        value: f64,
        reason: &'static str,
    },

    #[error("no entry for year {0}")]
    MissingYear(i32),

    #[error("no rate in effect on {0}")]
    NoRateInEffect(chrono::NaiveDate),

    #[error("rate schedule dates must be strictly increasing ({0} does not follow its predecessor)")]
    UnorderedSchedule(chrono::NaiveDate),

    #[error("need at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },

    #[error("series has no years in common")]
    EmptyAlignment,

    #[error("identical fitted curves: crossover is undefined")]
    DegenerateCrossover,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("media spec is {found}, operation needs {expected}")]
    WrongMediaKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("bundled dataset {id} failed checksum (expected {expected}, computed {actual})")]
    Checksum {
        id: String,
        expected: String,
        actual: String,
    },

    #[error("dataset {id}: {message}")]
    Dataset { id: String, message: String },

    #[error("unknown name {0:?}")]
    UnknownName(String),

    #[error("scenario {id}: {source}")]
    Scenario {
        id: String,
        #[source]
        source: Box<Error>,
    },

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
}
