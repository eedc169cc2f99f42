use std::path::PathBuf;

use thiserror::Error;

use crate::classical::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible projection: {0}")]
    IncompatibleProjection(String),

    /// The tridiagonal QL iteration ran out of sweeps. The offending matrix is
    /// written to `dump` (row, col, re, im) so it can be inspected offline.
    #[error("eigensolver did not converge after {sweeps} sweeps on a {dim}x{dim} matrix (dump: {})", dump.display())]
    NoConvergence {
        sweeps: usize,
        dim: usize,
        dump: PathBuf,
    },

    #[error("trajectory left the trusted region at t = {t}")]
    BlowUp { t: f64, partial: Box<Trajectory> },

    #[error("observable is not at most quadratic: {0}")]
    NotQuadratic(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
