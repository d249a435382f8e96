use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angular momentum: {0}")]
    InvalidHalfInt(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no {what} entry for {key} in the constants table")]
    MissingConstant { what: &'static str, key: String },

    #[error("constants file line {line}: {msg}")]
    ConstantsParse { line: usize, msg: String },

    #[error("basis of {size} states exceeds the capacity limit of {limit}")]
    Capacity { size: usize, limit: usize },

    #[error("field {field} V/cm lies outside the map range [{min}, {max}] V/cm")]
    OutOfRange { field: f64, min: f64, max: f64 },

    #[error("MOT extinction: ionization rate {rate} atoms/s is not below the loading rate {loading} atoms/s")]
    MotExtinction { rate: f64, loading: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 1 configuration, 2 physics domain, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ConstantsParse { .. } => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }
}
