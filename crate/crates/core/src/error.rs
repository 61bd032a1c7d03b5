use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("{0}")]
    Domain(String),

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schedule produced by {scheme} for seed {seed} violates constraints:\n{report}")]
    InvalidSchedule {
        scheme: String,
        seed: u64,
        report: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
