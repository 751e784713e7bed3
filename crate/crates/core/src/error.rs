use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at index {index} ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shell index {q} outside filter bank range [-1, {q_max}]")]
    ShellOutOfRange { q: i32, q_max: i32 },

    #[error("mode ({k1}, {k2}) lies above the dealias cutoff {cutoff}")]
    AboveCutoff { k1: i64, k2: i64, cutoff: i64 },

    #[error("exponent pair violates 2/s + 2/r <= 1 (r = {r}, s = {s})")]
    ExponentCriterion { r: f64, s: f64 },

    #[error("blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("time step {dt:e} below dt_min {dt_min:e} at t = {t} (near-singular state)")]
    StepTooSmall { t: f64, dt: f64, dt_min: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for integration aborts (blow-up or collapsing step size).
    pub fn is_abort(&self) -> bool {
        matches!(self, Error::BlowUp { .. } | Error::StepTooSmall { .. })
    }

    /// Simulation time of an abort, when there is one.
    pub fn abort_time(&self) -> Option<f64> {
        match self {
            Error::BlowUp { t, .. } | Error::StepTooSmall { t, .. } => Some(*t),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
