//! JSON scenario description. Every field has a default, so `{}` is the
//! bundled two-lap figure-eight run with learning enabled.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::control::{ControllerMode, FelCoupling, KinematicCtlConfig, PidConfig};
use crate::estimation::{EkfConfig, GpsConfig, KfRows, SteeringSensorConfig};
use crate::fuzzy::NetworkConfig;
use crate::learning::LearnConfig;
use crate::vehicle::TractorParams;
use crate::{Error, Result};

use super::trajectory::Trajectory;

/// Seeds of the independent noise streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Seeds {
    pub gps: u64,
    pub steering: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self::from_base(1)
    }
}

impl Seeds {
    /// Both streams derived from one number.
    pub fn from_base(seed: u64) -> Self {
        Self {
            gps: seed,
            steering: seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeedFilterConfig {
    pub rows: KfRows,
    /// White-acceleration spectral density of the velocity random walk.
    pub accel_psd: f64,
}

impl Default for SpeedFilterConfig {
    fn default() -> Self {
        Self {
            rows: KfRows::PositionVelocity,
            accel_psd: 0.05,
        }
    }
}

/// Where the yaw-rate loop gets its feedback from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YawRateSource {
    /// Backward difference of the EKF heading.
    EkfDifference,
    /// Savitzky-Golay slope over the latest EKF headings.
    #[default]
    EkfSavgol,
    /// Ground truth, for diagnostics only.
    Truth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct YawRateConfig {
    pub source: YawRateSource,
    pub savgol_window: usize,
    pub savgol_order: usize,
}

impl Default for YawRateConfig {
    fn default() -> Self {
        Self {
            source: YawRateSource::EkfSavgol,
            savgol_window: 7,
            savgol_order: 1,
        }
    }
}

/// Initial pose of the tractor relative to the start of the reference.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialOffset {
    /// Offset of the CG along the reference direction [m].
    pub along: f64,
    /// Offset of the CG to the left of the reference direction [m].
    pub left: f64,
    /// Heading offset [rad].
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub trajectory: Trajectory,
    /// Run length [s].
    pub duration: f64,
    /// Control period [s].
    pub ts: f64,
    pub mode: ControllerMode,
    pub seeds: Seeds,
    pub initial: InitialOffset,
    /// RK4 sub-steps per control period; derived from `ts` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub substeps: Option<usize>,
    pub vehicle: TractorParams,
    pub kinematic: KinematicCtlConfig,
    pub speed_pid: PidConfig,
    pub network: NetworkConfig,
    pub learning: LearnConfig,
    pub coupling: FelCoupling,
    pub gps: GpsConfig,
    pub steering_sensor: SteeringSensorConfig,
    pub speed_filter: SpeedFilterConfig,
    pub ekf: EkfConfig,
    pub yaw_rate: YawRateConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            trajectory: Trajectory::default(),
            duration: 240.0,
            ts: 0.05,
            mode: ControllerMode::PdPlusT2fnn,
            seeds: Seeds::default(),
            initial: InitialOffset::default(),
            substeps: None,
            vehicle: TractorParams::default(),
            kinematic: KinematicCtlConfig::default(),
            speed_pid: PidConfig::default(),
            network: NetworkConfig::default(),
            learning: LearnConfig::default(),
            coupling: FelCoupling::default(),
            gps: GpsConfig::default(),
            steering_sensor: SteeringSensorConfig::default(),
            speed_filter: SpeedFilterConfig::default(),
            ekf: EkfConfig::default(),
            yaw_rate: YawRateConfig::default(),
        }
    }
}

impl Scenario {
    /// Parses and validates a scenario. Waypoint files are resolved against
    /// `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut scn: Scenario = serde_json::from_str(text)?;
        scn.trajectory.resolve(base_dir)?;
        scn.validate()?;
        Ok(scn)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json(&std::fs::read_to_string(path)?, base)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Number of control periods; the trace has one more record.
    pub fn steps(&self) -> usize {
        (self.duration / self.ts).round() as usize
    }

    /// Whole laps covered by the run.
    pub fn laps(&self) -> usize {
        ((self.duration / self.trajectory.period()) + 1e-9).floor().max(1.0) as usize
    }

    pub fn with_mode(mut self, mode: ControllerMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seeds = Seeds::from_base(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidScenario(m.into()));
        if !(self.ts > 0.0 && self.ts.is_finite()) {
            return bad("ts must be positive");
        }
        self.trajectory.validate()?;
        if !(self.duration.is_finite() && self.duration + 1e-9 >= self.trajectory.period()) {
            return bad("duration must cover at least one reference period");
        }
        let steps = self.duration / self.ts;
        if (steps - steps.round()).abs() > 1e-6 {
            return bad("duration must be a whole number of control periods");
        }
        if ![self.initial.along, self.initial.left, self.initial.heading].iter().all(|v| v.is_finite()) {
            return bad("initial offsets must be finite");
        }
        if self.substeps == Some(0) {
            return bad("substeps must be at least 1");
        }
        self.vehicle.validate()?;
        self.kinematic.validate()?;
        self.speed_pid.validate()?;
        self.learning.validate()?;
        if (self.kinematic.l_r - self.vehicle.lr).abs() > 1e-12 {
            return bad("kinematic.l_r must match vehicle.lr");
        }
        if !(self.speed_filter.accel_psd >= 0.0) {
            return bad("speed_filter.accel_psd must be non-negative");
        }
        if self.yaw_rate.source == YawRateSource::EkfSavgol
            && (self.yaw_rate.savgol_window.is_multiple_of(2) || self.yaw_rate.savgol_order >= self.yaw_rate.savgol_window)
        {
            return bad("yaw_rate savgol window must be odd and exceed the order");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_default() {
        let s = Scenario::from_json("{}", Path::new(".")).unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.steps(), 4800);
        assert_eq!(s.laps(), 2);
    }

    #[test]
    fn round_trip() {
        let s = Scenario::default().with_seed(9).with_mode(ControllerMode::PdOnly);
        let back = Scenario::from_json(&s.to_json().unwrap(), Path::new(".")).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_short_duration_and_unknown_fields() {
        assert!(Scenario::from_json(r#"{"duration": 60}"#, Path::new(".")).is_err());
        assert!(Scenario::from_json(r#"{"speed": 2}"#, Path::new(".")).is_err());
        assert!(Scenario::from_json(r#"{"ts": 0}"#, Path::new(".")).is_err());
    }
}
