use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A vehicle's velocity fell below the spatial-domain floor.
    #[error("vehicle {vehicle} velocity {velocity} m/s at or below floor at s = {position} m")]
    NonPositiveVelocity {
        vehicle: usize,
        position: f64,
        velocity: f64,
    },
    #[error("position is not strictly increasing (vehicle {vehicle}, sample {index})")]
    NonMonotonePosition { vehicle: usize, index: usize },
    #[error("time is not strictly increasing (vehicle {vehicle}, sample {index})")]
    NonMonotoneTime { vehicle: usize, index: usize },
    #[error("predecessor history does not cover the required window")]
    HistoryTooShort,
    #[error("predecessor history is not strictly increasing at sample {index}")]
    NonMonotoneHistory { index: usize },
    #[error("query {value} outside sampled range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("closed-loop matrix is not Hurwitz (eigenvalue real parts {re1}, {re2})")]
    NotHurwitz { re1: f64, re2: f64 },
    #[error("integration produced a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("interconnection gain {gamma_bar} is not contractive (need < 1)")]
    GainNotContractive { gamma_bar: f64 },
    #[error("hypothesis violated: follower {vehicle} starts with nonzero timing error {value}")]
    HypothesisViolated { vehicle: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
