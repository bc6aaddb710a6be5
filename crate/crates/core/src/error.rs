use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("fields live on different grids or have different component counts")]
    GridMismatch,

    #[error("field is not Hermitian-symmetric (does not represent a real field)")]
    NonHermitian,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("symbol expression error: {0}")]
    Symbol(String),

    #[error("Picard iteration did not converge after {iterations} iterations (last contraction ratio {last_ratio:.3e})")]
    NonConvergence { iterations: usize, last_ratio: f64 },

    #[error("blow-up: non-finite coefficient at step {step} (t = {time:.6e})")]
    BlowUp { step: usize, time: f64 },

    #[error("rate fit impossible: {0}")]
    Fit(String),

    #[error("all gaps below the noise floor {floor:.3e}")]
    BelowNoiseFloor { floor: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("run at alpha = {alpha} failed: {source}")]
    AtAlpha { alpha: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Strips `AtAlpha` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtAlpha { source, .. } => source.root(),
            e => e,
        }
    }
}
