//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by model construction, solvers and the CLI front end.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A capability was requested that the selected engine variant lacks
    /// (e.g. the mirror sideband Hamiltonian of the pump-only engine).
    #[error("unsupported for engine variant {variant}: {what}")]
    Unsupported { variant: String, what: String },

    /// A linear solve failed or a solution failed its residual check.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A configuration file could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    /// I/O error wrapper (file reading/writing in the CLI).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
