use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("integrator step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("solution blew up at t = {t} (|y| = {magnitude:e})")]
    BlowUp { t: f64, magnitude: f64 },

    #[error("width variable collapsed towards zero at t = {t} (alpha = {alpha:e})")]
    WidthCollapse { t: f64, alpha: f64 },

    #[error("determinant invariant drifted by {drift:e} at t = {t}")]
    InvariantDrift { t: f64, drift: f64 },

    #[error("Ermakov invariant vanishes (mean at rest at the origin); complex trajectory undefined")]
    VanishingInvariant,

    #[error("phase-space grid captures only {captured} of the probability mass")]
    InsufficientCoverage { captured: f64 },

    #[error("finite-difference residual does not converge (ratio {ratio})")]
    NonConvergentResidual { ratio: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
