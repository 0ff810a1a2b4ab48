//! Three-layer tractor controller: the kinematic trajectory law producing
//! speed and yaw-rate references, a PID speed loop, and a PD controller
//! working in parallel with the type-2 network on yaw rate.

use serde::{Deserialize, Serialize};

use crate::math;
use crate::fuzzy::T2FnnState;
use crate::learning::{learn_step, LearnConfig, LearnSignals, NetworkInputs};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicCtlConfig {
    /// Gain on the position error inside the `tanh`.
    pub k_e: f64,
    /// Saturation constant [m/s].
    pub k_s: f64,
    /// Offset of the controlled point ahead of the rear axle [m].
    pub l_r: f64,
}

impl Default for KinematicCtlConfig {
    fn default() -> Self {
        Self {
            k_e: 1.0,
            k_s: 1.0,
            l_r: 0.7,
        }
    }
}

impl KinematicCtlConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_e > 0.0 && self.k_s > 0.0 && self.l_r > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidControlConfig(
                "kinematic law needs k_e, k_s and l_r positive".into(),
            ))
        }
    }
}

/// Desired position and velocity at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RefPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub x_dot: f64,
    pub y_dot: f64,
}

/// Planar pose `(x, y, ψ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

/// Velocity of the controlled point and yaw rate for body inputs `(u, γ)`.
pub fn forward_kinematics(u: f64, gamma: f64, psi: f64, l_r: f64) -> (f64, f64, f64) {
    let (s, c) = math::sin_cos(psi);
    (c * u - l_r * s * gamma, s * u + l_r * c * gamma, gamma)
}

/// Inverse of [`forward_kinematics`] on its first two rows.
pub fn inverse_kinematics(x_dot: f64, y_dot: f64, psi: f64, l_r: f64) -> (f64, f64) {
    let (s, c) = math::sin_cos(psi);
    (c * x_dot + s * y_dot, (-s * x_dot + c * y_dot) / l_r)
}

/// Trajectory-tracking law: the reference velocity plus a saturated
/// position correction, mapped through the inverse kinematics.
/// Returns `(u_ref, γ_ref)`.
pub fn kinematic_control(reference: &RefPoint, pose: &Pose, cfg: &KinematicCtlConfig) -> (f64, f64) {
    let e_x = reference.x - pose.x;
    let e_y = reference.y - pose.y;
    let vx = reference.x_dot + cfg.k_s * math::tanh(cfg.k_e * e_x);
    let vy = reference.y_dot + cfg.k_s * math::tanh(cfg.k_e * e_y);
    inverse_kinematics(vx, vy, pose.psi, cfg.l_r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidConfig {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub output_min: f64,
    pub output_max: f64,
    /// The integral state is clamped to `±integral_limit`.
    pub integral_limit: f64,
}

impl Default for PidConfig {
    fn default() -> Self {
        Self {
            kp: 1.5,
            ki: 0.3,
            kd: 0.0,
            output_min: -1.5,
            output_max: 1.5,
            integral_limit: 2.0,
        }
    }
}

impl PidConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.output_min, self.output_max, self.integral_limit]
            .iter()
            .all(|v| v.is_finite());
        if finite
            && self.output_min < self.output_max
            && self.kp >= 0.0
            && self.ki >= 0.0
            && self.kd >= 0.0
            && self.integral_limit >= 0.0
        {
            Ok(())
        } else {
            Err(Error::InvalidControlConfig(format!("bad PID configuration {self:?}")))
        }
    }
}

/// Longitudinal speed PID with a clamped integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedPid {
    cfg: PidConfig,
    integral: f64,
    prev_error: Option<f64>,
}

impl SpeedPid {
    pub fn new(cfg: PidConfig) -> Self {
        Self {
            cfg,
            integral: 0.0,
            prev_error: None,
        }
    }

    /// Acceleration command for the current speed error.
    pub fn step(&mut self, u_ref: f64, u_meas: f64, dt: f64) -> f64 {
        let e = u_ref - u_meas;
        let lim = self.cfg.integral_limit;
        self.integral = (self.integral + e * dt).clamp(-lim, lim);
        let derivative = self.prev_error.map_or(0.0, |p| (e - p) / dt);
        self.prev_error = Some(e);
        (self.cfg.kp * e + self.cfg.ki * self.integral + self.cfg.kd * derivative)
            .clamp(self.cfg.output_min, self.cfg.output_max)
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }
}

/// Output of the yaw-rate PD law.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PdOutput {
    pub e: f64,
    pub e_dot: f64,
    pub tau: f64,
}

/// PD on yaw-rate error; the derivative is a backward difference and is zero
/// on the first call.
#[derive(Debug, Clone, PartialEq)]
pub struct PdYaw {
    pub kp: f64,
    pub kd: f64,
    prev_error: Option<f64>,
}

impl PdYaw {
    pub fn new(kp: f64, kd: f64) -> Self {
        Self {
            kp,
            kd,
            prev_error: None,
        }
    }

    pub fn step(&mut self, gamma_ref: f64, gamma_meas: f64, dt: f64) -> PdOutput {
        let e = gamma_ref - gamma_meas;
        let e_dot = self.prev_error.map_or(0.0, |p| (e - p) / dt);
        self.prev_error = Some(e);
        PdOutput {
            e,
            e_dot,
            tau: self.kp * e + self.kd * e_dot,
        }
    }
}

/// How the PD output, the network output and the learning error are tied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FelCoupling {
    /// Steering command `u = τpd - τn`; the learning error
    /// `τc = τn + u` is then exactly the PD output, so `Sc = kD Sp`.
    #[default]
    PdIsLearningError,
    /// Steering command `u = τpd - τn`; learning error `τc = τn + τpd`.
    PdPlusNetwork,
}

/// Which controllers act on yaw rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerMode {
    PdOnly,
    PdPlusT2fnn,
}

impl std::str::FromStr for ControllerMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pd" | "pd_only" | "PD_ONLY" => Ok(Self::PdOnly),
            "pd-t2fnn" | "pd_plus_t2fnn" | "PD_PLUS_T2FNN" => Ok(Self::PdPlusT2fnn),
            other => Err(format!("unknown controller mode `{other}` (expected pd or pd-t2fnn)")),
        }
    }
}

impl std::fmt::Display for ControllerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::PdOnly => "pd",
            Self::PdPlusT2fnn => "pd-t2fnn",
        })
    }
}

/// Everything one yaw-controller step produces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct YawStep {
    /// Saturated steering command.
    pub command: f64,
    pub pd: PdOutput,
    /// `Sp = ė + χ e`
    pub s_p: f64,
    /// `Sp² / 2`
    pub v_p: f64,
    /// Learning diagnostics; `None` when the network is disabled.
    pub learn: Option<LearnSignals>,
}

impl YawStep {
    pub fn tau_n(&self) -> f64 {
        self.learn.map_or(0.0, |l| l.tau_n)
    }
}

/// PD ∥ T2FNN yaw-rate controller with its learning state.
#[derive(Debug, Clone)]
pub struct YawController {
    pd: PdYaw,
    network: Option<T2FnnState>,
    learn: LearnConfig,
    coupling: FelCoupling,
    steer_limit: f64,
    prev_inputs: Option<(f64, f64)>,
}

impl YawController {
    /// PD-only controller when `network` is `None`.
    pub fn new(
        network: Option<T2FnnState>,
        learn: LearnConfig,
        coupling: FelCoupling,
        steer_limit: f64,
    ) -> Result<Self> {
        learn.validate()?;
        if let Some(net) = &network {
            net.validate()?;
        }
        Ok(Self {
            pd: PdYaw::new(learn.kp, learn.kd),
            network,
            learn,
            coupling,
            steer_limit,
            prev_inputs: None,
        })
    }

    pub fn network(&self) -> Option<&T2FnnState> {
        self.network.as_ref()
    }

    pub fn learn_config(&self) -> &LearnConfig {
        &self.learn
    }

    pub fn step(&mut self, gamma_ref: f64, gamma_meas: f64, dt: f64) -> YawStep {
        let pd = self.pd.step(gamma_ref, gamma_meas, dt);
        let s_p = pd.e_dot + self.learn.chi * pd.e;
        let limit = self.steer_limit;

        let Some(net) = self.network.as_mut() else {
            return YawStep {
                command: pd.tau.clamp(-limit, limit),
                pd,
                s_p,
                v_p: 0.5 * s_p * s_p,
                learn: None,
            };
        };

        let (x1, x2) = (pd.e, pd.e_dot);
        let (x1_dot, x2_dot) = self
            .prev_inputs
            .map_or((0.0, 0.0), |(p1, p2)| ((x1 - p1) / dt, (x2 - p2) / dt));
        self.prev_inputs = Some((x1, x2));

        let tau_n = net.output(x1, x2, self.learn.denom_floor);
        let command = pd.tau - tau_n;
        let coupled = match self.coupling {
            FelCoupling::PdIsLearningError => command,
            FelCoupling::PdPlusNetwork => pd.tau,
        };
        let inputs = NetworkInputs {
            x1,
            x2,
            x1_dot,
            x2_dot,
        };
        let learn = learn_step(net, inputs, coupled, &self.learn, dt);
        YawStep {
            command: command.clamp(-limit, limit),
            pd,
            s_p,
            v_p: 0.5 * s_p * s_p,
            learn: Some(learn),
        }
    }
}
