use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes of the simulation and prediction pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("truncation does not contain the reference state {0}")]
    EmptyTruncation(String),

    #[error("basis dimension {dimension} exceeds the configured ceiling {ceiling}")]
    TruncationTooLarge { dimension: usize, ceiling: usize },

    #[error("kernel needs {bytes} bytes, above the memory ceiling of {ceiling} bytes")]
    MemoryCeiling { bytes: usize, ceiling: usize },

    #[error("state norm {norm} differs from 1 by more than {tolerance:e}")]
    NotNormalized { norm: f64, tolerance: f64 },

    #[error("boundary flux {flux:e} exceeds {threshold:e}: the scenario is not bound")]
    BoundaryFluxTooLarge { flux: f64, threshold: f64 },

    #[error("beam weights sum to {sum}, expected 1")]
    WeightSumViolation { sum: f64 },

    #[error("quadratic decay fit failed: {0}")]
    FitFailure(String),

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StabilityViolation { dt: f64, bound: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors raised by numerical guards rather than bad input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::BoundaryFluxTooLarge { .. }
                | Error::FitFailure(_)
                | Error::StabilityViolation { .. }
                | Error::MemoryCeiling { .. }
        )
    }
}
