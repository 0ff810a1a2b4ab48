//! Tractor plant: rear-axle and centre-of-gravity kinematics, the linear-tire
//! yaw dynamics, the steering actuator and a fixed-step integrator that
//! produces ground-truth motion.
//!
//! Conventions: positions in metres, angles in radians, `x`/`y` of
//! [`RigidBodyState`] locate the centre of gravity. The rear-axle centre
//! (where the GPS antenna sits) is `lr` behind it along the heading.

use std::path::Path;

use nalgebra::{Matrix2, SVector, Vector2};
use serde::{Deserialize, Serialize};

use crate::math;
use crate::ode;
use crate::{Error, Result};

/// Physical constants of the tractor. JSON field names match the struct
/// fields; every quantity is SI (kg, kg·m², m, N/rad, rad, rad/s, s, 1/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TractorParams {
    pub mass: f64,
    pub yaw_inertia: f64,
    /// CG to front axle.
    pub lf: f64,
    /// CG to rear axle.
    pub lr: f64,
    pub wheelbase: f64,
    pub c_alpha_f: f64,
    pub c_alpha_r: f64,
    pub steer_limit: f64,
    pub steer_rate_limit: f64,
    pub steer_deadband: f64,
    pub steer_lag_tau: f64,
    /// Bias of the steering servo: with a constant command the wheels settle
    /// at `command + steer_offset`.
    pub steer_offset: f64,
    /// Linear drag coefficient of the longitudinal model `du/dt = a - drag*u`.
    pub longitudinal_drag: f64,
    /// Floor below which the linear yaw model refuses to evaluate.
    pub min_speed: f64,
}

impl Default for TractorParams {
    /// Plausible compact-tractor values (about 1.1 t, 1.7 m wheelbase).
    fn default() -> Self {
        let lf = 1.0;
        let lr = 0.7;
        Self {
            mass: 1100.0,
            yaw_inertia: 800.0,
            lf,
            lr,
            wheelbase: lf + lr,
            c_alpha_f: 20_000.0,
            c_alpha_r: 35_000.0,
            steer_limit: 45f64.to_radians(),
            steer_rate_limit: 20f64.to_radians(),
            steer_deadband: 0.5f64.to_radians(),
            steer_lag_tau: 0.2,
            steer_offset: 0.0,
            longitudinal_drag: 0.5,
            min_speed: 0.1,
        }
    }
}

impl TractorParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("yaw_inertia", self.yaw_inertia),
            ("lf", self.lf),
            ("lr", self.lr),
            ("wheelbase", self.wheelbase),
            ("c_alpha_f", self.c_alpha_f),
            ("c_alpha_r", self.c_alpha_r),
            ("steer_limit", self.steer_limit),
            ("steer_rate_limit", self.steer_rate_limit),
            ("steer_lag_tau", self.steer_lag_tau),
            ("min_speed", self.min_speed),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {value}")));
            }
        }
        if (self.wheelbase - (self.lf + self.lr)).abs() > 1e-12 * self.wheelbase {
            return Err(Error::InvalidParams(format!(
                "wheelbase {} != lf + lr = {}",
                self.wheelbase,
                self.lf + self.lr
            )));
        }
        if self.steer_limit >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::InvalidParams("steer_limit must be below pi/2".into()));
        }
        if !(self.steer_deadband >= 0.0) || !(self.longitudinal_drag >= 0.0) {
            return Err(Error::InvalidParams(
                "steer_deadband and longitudinal_drag must be non-negative".into(),
            ));
        }
        if !self.steer_offset.is_finite() {
            return Err(Error::InvalidParams("steer_offset must be finite".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: Self = serde_json::from_str(text)?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Rigid-body state of the tractor at its centre of gravity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RigidBodyState {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    /// Longitudinal velocity.
    pub u: f64,
    /// Lateral velocity.
    pub v: f64,
    /// Yaw rate.
    pub gamma: f64,
    /// Actual front-wheel steering angle.
    pub delta: f64,
}

impl RigidBodyState {
    /// Position of the rear-axle centre.
    pub fn rear_axle(&self, params: &TractorParams) -> (f64, f64) {
        (
            self.x - params.lr * math::cos(self.psi),
            self.y - params.lr * math::sin(self.psi),
        )
    }
}

/// Time derivatives of a planar pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseRate {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
}

/// Pose rates of the rear-axle point for the no-slip bicycle.
pub fn kinematic_derivatives_r(state: &RigidBodyState, params: &TractorParams) -> PoseRate {
    PoseRate {
        x: state.u * math::cos(state.psi),
        y: state.u * math::sin(state.psi),
        psi: state.u * math::tan(state.delta) / params.wheelbase,
    }
}

/// Pose rates at the centre of gravity, including the lateral velocity.
pub fn kinematic_derivatives_cg(state: &RigidBodyState, params: &TractorParams) -> PoseRate {
    let (s, c) = math::sin_cos(state.psi);
    PoseRate {
        x: state.u * c - state.v * s,
        y: state.u * s + state.v * c,
        psi: state.u * math::tan(state.delta) / params.wheelbase,
    }
}

/// State-space matrices of the lateral/yaw model `[v̇, γ̇] = A [v, γ] + B δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YawMatrices {
    pub a: Matrix2<f64>,
    pub b: Vector2<f64>,
}

impl YawMatrices {
    /// Equilibrium `(v, γ)` for a constant steering angle.
    pub fn steady_state(&self, delta: f64) -> Option<Vector2<f64>> {
        self.a.try_inverse().map(|inv| -(inv * self.b) * delta)
    }
}

pub fn yaw_dynamics_matrices(params: &TractorParams, u: f64) -> Result<YawMatrices> {
    if !(u > params.min_speed) {
        return Err(Error::SpeedTooLow {
            u,
            u_min: params.min_speed,
        });
    }
    let TractorParams {
        mass: m,
        yaw_inertia: iz,
        lf,
        lr,
        c_alpha_f: cf,
        c_alpha_r: cr,
        ..
    } = *params;
    let cross = -lf * cf + lr * cr;
    let a = Matrix2::new(
        -(cf + cr) / (m * u),
        cross / (m * u) - u,
        cross / (iz * u),
        -(lf * lf * cf + lr * lr * cr) / (iz * u),
    );
    let b = Vector2::new(cf / m, lf * cf / iz);
    Ok(YawMatrices { a, b })
}

/// Side-slip angles and lateral forces of the linear tire model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TireForces {
    pub alpha_f: f64,
    pub alpha_r: f64,
    pub f_lf: f64,
    pub f_lr: f64,
}

pub fn side_slip_and_forces(state: &RigidBodyState, params: &TractorParams) -> Result<TireForces> {
    if !(state.u > params.min_speed) {
        return Err(Error::SpeedTooLow {
            u: state.u,
            u_min: params.min_speed,
        });
    }
    let alpha_f = (state.v + params.lf * state.gamma) / state.u - state.delta;
    let alpha_r = (state.v - params.lr * state.gamma) / state.u;
    Ok(TireForces {
        alpha_f,
        alpha_r,
        f_lf: -params.c_alpha_f * alpha_f,
        f_lr: -params.c_alpha_r * alpha_r,
    })
}

/// One control period of the steering actuator: servo bias, dead-band on the
/// command error, exact first-order lag, rate limit, then hard saturation.
pub fn steering_actuator_step(delta: f64, command: f64, params: &TractorParams, dt: f64) -> f64 {
    let limit = params.steer_limit;
    let target = (command + params.steer_offset).clamp(-limit, limit);
    let error = target - delta;
    if error.abs() <= params.steer_deadband {
        return delta.clamp(-limit, limit);
    }
    let lag = error * (1.0 - math::exp(-dt / params.steer_lag_tau));
    let max_move = params.steer_rate_limit * dt;
    (delta + lag.clamp(-max_move, max_move)).clamp(-limit, limit)
}

/// Quantizes a sensed angle to the given resolution (rounding to nearest).
pub fn quantize(angle: f64, resolution: f64) -> f64 {
    (angle / resolution).round() * resolution
}

/// Maximum RK4 sub-step used by [`plant_step`]; the linear-tire yaw modes are
/// stiff at tractor speeds (eigenvalues of order -50 1/s).
pub const MAX_SUBSTEP: f64 = 0.005;

pub fn default_substeps(dt: f64) -> usize {
    ((dt / MAX_SUBSTEP).ceil() as usize).max(1)
}

/// Advances the plant by `dt` with the default sub-stepping.
pub fn plant_step(
    state: &RigidBodyState,
    steer_cmd: f64,
    accel_cmd: f64,
    params: &TractorParams,
    dt: f64,
) -> Result<RigidBodyState> {
    plant_step_with(state, steer_cmd, accel_cmd, params, dt, default_substeps(dt))
}

/// Advances the plant by `dt`: the actuator moves first, then the
/// continuous states `(x, y, ψ, u, v, γ)` are integrated with `substeps` RK4
/// steps holding the steering angle at its mid-step value. The heading
/// integrates the dynamic yaw rate γ.
pub fn plant_step_with(
    state: &RigidBodyState,
    steer_cmd: f64,
    accel_cmd: f64,
    params: &TractorParams,
    dt: f64,
    substeps: usize,
) -> Result<RigidBodyState> {
    let delta_next = steering_actuator_step(state.delta, steer_cmd, params, dt);
    let wheel = 0.5 * (state.delta + delta_next);

    let y0 = SVector::<f64, 6>::from([state.x, state.y, state.psi, state.u, state.v, state.gamma]);
    let rhs = |y: &SVector<f64, 6>| -> Result<SVector<f64, 6>> {
        let (psi, u, v, gamma) = (y[2], y[3], y[4], y[5]);
        let yaw = yaw_dynamics_matrices(params, u)?;
        let lateral = yaw.a * Vector2::new(v, gamma) + yaw.b * wheel;
        let (s, c) = math::sin_cos(psi);
        Ok(SVector::<f64, 6>::from([
            u * c - v * s,
            u * s + v * c,
            gamma,
            accel_cmd - params.longitudinal_drag * u,
            lateral[0],
            lateral[1],
        ]))
    };
    let y1 = ode::rk4_integrate(rhs, &y0, dt, substeps)?;
    Ok(RigidBodyState {
        x: y1[0],
        y: y1[1],
        psi: y1[2],
        u: y1[3],
        v: y1[4],
        gamma: y1[5],
        delta: delta_next,
    })
}
