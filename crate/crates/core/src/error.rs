use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The linear yaw model divides by the longitudinal speed.
    #[error("speed {u} m/s is at or below the yaw-model floor {u_min} m/s")]
    SpeedTooLow { u: f64, u_min: f64 },

    #[error("invalid tractor parameters: {0}")]
    InvalidParams(String),

    #[error("invalid network configuration: {0}")]
    InvalidNetwork(String),

    #[error("invalid learning configuration: {0}")]
    InvalidLearnConfig(String),

    #[error("invalid controller configuration: {0}")]
    InvalidControlConfig(String),

    #[error("bad Savitzky-Golay window: window={window}, order={order}, samples={samples}")]
    BadWindow {
        window: usize,
        order: usize,
        samples: usize,
    },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("traces are not time-aligned: {0}")]
    MisalignedTraces(String),

    #[error("simulation diverged at step {step}: {reason}")]
    SimDiverged { step: usize, reason: String },

    #[error("malformed trace file: {0}")]
    BadTrace(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
