use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The operation is undefined at (or numerically at) the exceptional point.
    #[error("exceptional point: {0}")]
    ExceptionalPoint(String),

    #[error("generator is not defective at the requested eigenvalue (nilpotency ratio {ratio:.3e})")]
    NotDefective { ratio: f64 },

    #[error("Jordan chain residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NumericalDegeneracy { residual: f64, tol: f64 },

    #[error("z = {z} outside of [0, {z_total}]")]
    Domain { z: f64, z_total: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("oscillation phase undefined: {0}")]
    UndefinedPhase(&'static str),

    #[error("integration diverged at z = {z}")]
    Divergence { z: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("config line {line}: `{key}`: {reason}")]
    Config {
        line: usize,
        key: String,
        reason: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Errors caused by the input configuration rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidParameter { .. } | Error::InvalidSchedule(_)
        )
    }
}
