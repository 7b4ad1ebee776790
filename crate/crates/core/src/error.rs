use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate truncation: cutoff must be at least {min}, got {got}")]
    DegenerateTruncation { min: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no discrete ladder in continuum/critical regime (delta = {delta}, 2|g| = {threshold})")]
    NoDiscreteLadder { delta: f64, threshold: f64 },

    #[error("continuum spectrum: detuning is zero")]
    ContinuumSpectrum,

    #[error(
        "truncation insufficient: boundary population {boundary_population:.3e} exceeds \
         {leak_tol:.3e} at cutoff {cutoff} (max_cutoff {max_cutoff})"
    )]
    TruncationInsufficient {
        cutoff: usize,
        max_cutoff: usize,
        boundary_population: f64,
        leak_tol: f64,
    },

    #[error("norm drift {drift:.3e} exceeds allowed {allowed:.3e}")]
    NormDrift { drift: f64, allowed: f64 },

    #[error("integrator step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("series too short: need at least {needed} samples, got {got}")]
    ShortSeries { needed: usize, got: usize },

    #[error("maximum at the edge of the time window (t = {t}); extend time window")]
    BoundaryMaximum { t: f64 },

    #[error("insufficient span: window {span} covers less than two predicted periods ({period})")]
    InsufficientSpan { span: f64, period: f64 },

    #[error("fewer than 3 converged eigenvalues ({converged})")]
    TooFewConverged { converged: usize },

    #[error("index {index} outside the retained window")]
    IndexOutOfRange { index: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
