use thiserror::Error;

/// Errors raised by the environment, the oracles, the learners and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arm index {index} out of range for an instance with {arms} arms")]
    ArmOutOfRange { index: usize, arms: usize },

    #[error("ranking cutoff {rank} out of range 1..={arms}")]
    RankOutOfRange { rank: usize, arms: usize },

    #[error("invalid discount function: {0}")]
    InvalidDiscount(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("delay-state space has {nodes} states, above the cap of {cap}")]
    StateSpaceTooLarge { nodes: u128, cap: usize },

    #[error("invalid maintenance instance: {0}")]
    InvalidPmsp(String),

    #[error("schedule period {period} exceeds the cap of {cap}")]
    PeriodTooLarge { period: u128, cap: u64 },

    #[error("calibration bound d0 = {d0} must exceed every delay (largest is {max_delay})")]
    CalibrationBound { d0: usize, max_delay: usize },

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("malformed file {path}: {message}")]
    Format { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
