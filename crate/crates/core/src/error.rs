use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by ingestion, estimation, and experiment code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: non-finite value {value}")]
    NonFinite { line: u64, value: f64 },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("unknown label {0}")]
    UnknownLabel(i64),

    #[error("insufficient sample: {count} value(s), at least 2 required")]
    InsufficientSample { count: usize },

    #[error("zero variance: all values identical")]
    ZeroVariance,

    #[error("label {label}: {source}")]
    AtLabel {
        label: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("insufficient surrogates: {0} requested, at least 2 required")]
    InsufficientSurrogates(usize),

    #[error("quadrature did not converge on [{lo}, {hi}] (estimate {estimate})")]
    NoConvergence { lo: f64, hi: f64, estimate: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("at {param} = {value}, replicate {replicate}: {source}")]
    AtReplicate {
        param: &'static str,
        value: f64,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures caused by bad input or configuration rather than by
    /// the computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::NonFinite { .. }
                | Error::EmptyDataset
                | Error::InvalidGrid(_)
                | Error::InvalidParameter(_)
        )
    }

    pub(crate) fn at_label(label: i64, source: Error) -> Self {
        Error::AtLabel {
            label,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
