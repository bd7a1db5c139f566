use thiserror::Error;

/// Errors produced by the solvers, the scenario harness and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{what} is undefined at r = {r}")]
    Domain { what: &'static str, r: f64 },

    #[error("steady branch reaches a sonic point at r = {sonic_radius} before r = {r}")]
    Sonic { sonic_radius: f64, r: f64 },

    #[error("trajectory leaves the domain of definition at t = {exit_time} (r = {r})")]
    Truncated { exit_time: f64, r: f64 },

    #[error("root finder failed: {0}")]
    Root(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("non-finite value at step {step}, cell {cell}")]
    NonFinite { step: usize, cell: usize },

    #[error("scheme failure at cell {cell}: {reason}")]
    Scheme { cell: usize, reason: String },

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("inadmissible shock: {0}")]
    InadmissibleShock(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
