use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected} modes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid of {m_points} points cannot represent {n_modes} modes (need at least {needed})")]
    GridTooSmall {
        m_points: usize,
        n_modes: usize,
        needed: usize,
    },

    #[error("non-finite value encountered at t = {last_good_time}")]
    NumericalAbort { last_good_time: f64 },

    #[error("Picard iteration is not contracting (increment {increment:e} after {iterations} iterations); reduce T")]
    NotContracting { iterations: usize, increment: f64 },

    #[error("rejection acceptance rate {rate:e} after {draws} draws is below 1e-4; change alpha, N or use importance sampling")]
    AcceptanceTooLow { rate: f64, draws: u64 },

    #[error("all importance weights are zero")]
    ZeroWeights,

    #[error("state file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalAbort { .. }
                | Error::NotContracting { .. }
                | Error::AcceptanceTooLow { .. }
                | Error::ZeroWeights
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
