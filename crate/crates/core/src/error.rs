use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left} vs {right}")]
    Shape {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("channel `{0}` not present")]
    MissingChannel(String),

    #[error("variable is not recorded on this tape")]
    NotOnTape,

    #[error("non-finite value at integration step {step} (t = {time} h)")]
    NonFiniteState { step: usize, time: f64 },

    #[error("non-finite gradient for parameter `{0}`")]
    NonFiniteGradient(String),

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error("checkpoint version {found} is not supported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("checkpoint parameter `{name}`: {msg}")]
    CheckpointShape { name: String, msg: String },

    #[error("cannot parse {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(
        "masked target cell at row {row} lies inside the first {lookback} rows; enable the mean fallback to fill it"
    )]
    ImputeWarmup { row: usize, lookback: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
