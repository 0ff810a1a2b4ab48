//! The 20 Hz closed loop: sense, estimate, control, actuate.

use nalgebra::{Matrix4, Vector3};

use crate::math;
use crate::control::{kinematic_control, ControllerMode, Pose, SpeedPid, YawController, YawStep};
use crate::estimation::{
    ekf_step, kf_predict_update, kf_process_noise, wrap_angle, EkfState, GpsModel, GpsSample, KfState,
    SavgolFilter, SteeringSensor,
};
use crate::fuzzy::T2FnnState;
use crate::vehicle::{default_substeps, plant_step_with, RigidBodyState};
use crate::{Error, Result};

use super::metrics::{compute_metrics, path_errors, Metrics, PathSample};
use super::scenario::{Scenario, YawRateSource};
use super::trace::{SimTrace, TraceMeta, TraceRow, SCHEMA_VERSION};

/// Yaw rate above which the run is declared diverged [rad/s].
pub const MAX_YAW_RATE: f64 = 10.0;

/// Step-by-step simulation of one scenario.
pub struct Simulation {
    scn: Scenario,
    path: Vec<PathSample>,
    substeps: usize,
    step: usize,
    truth: RigidBodyState,
    /// Wheel angle at the start of the previous period, for the sensor sweep.
    delta_prev: f64,
    gps: GpsModel,
    steering: SteeringSensor,
    kf: Option<KfState>,
    ekf: Option<EkfState>,
    /// Inputs applied to the EKF prediction at the next fix.
    ekf_inputs: (f64, f64),
    psi_history: Vec<f64>,
    yaw_savgol: Option<SavgolFilter>,
    pid: SpeedPid,
    yaw: YawController,
    last: Option<TraceRow>,
}

impl Simulation {
    pub fn new(scn: &Scenario) -> Result<Self> {
        scn.validate()?;
        let steps = scn.steps();
        let path = (0..=steps)
            .map(|k| {
                let r = scn.trajectory.sample(k as f64 * scn.ts);
                PathSample {
                    x: r.x,
                    y: r.y,
                    x_dot: r.x_dot,
                    y_dot: r.y_dot,
                }
            })
            .collect();

        // start on the reference, aligned with its velocity
        let r0 = scn.trajectory.sample(0.0);
        let speed = math::hypot(r0.x_dot, r0.y_dot).max(scn.vehicle.min_speed * 2.0);
        let dir = math::atan2(r0.y_dot, r0.x_dot);
        let (s, c) = math::sin_cos(dir);
        let off = scn.initial;
        let truth = RigidBodyState {
            x: r0.x + off.along * c - off.left * s,
            y: r0.y + off.along * s + off.left * c,
            psi: dir + off.heading,
            u: speed,
            ..Default::default()
        };

        let network = match scn.mode {
            ControllerMode::PdOnly => None,
            ControllerMode::PdPlusT2fnn => Some(T2FnnState::new(&scn.network)?),
        };
        let yaw = YawController::new(network, scn.learning, scn.coupling, scn.vehicle.steer_limit)?;
        let yaw_savgol = match scn.yaw_rate.source {
            YawRateSource::EkfSavgol => Some(SavgolFilter::new(scn.yaw_rate.savgol_window, scn.yaw_rate.savgol_order)?),
            _ => None,
        };
        Ok(Self {
            path,
            substeps: scn.substeps.unwrap_or_else(|| default_substeps(scn.ts)),
            step: 0,
            truth,
            delta_prev: truth.delta,
            gps: GpsModel::new(scn.gps, scn.seeds.gps)?,
            steering: SteeringSensor::new(scn.steering_sensor, scn.seeds.steering)?,
            kf: None,
            ekf: None,
            ekf_inputs: (0.0, 0.0),
            psi_history: Vec::new(),
            yaw_savgol,
            pid: SpeedPid::new(scn.speed_pid),
            yaw,
            last: None,
            scn: scn.clone(),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scn
    }

    pub fn truth(&self) -> &RigidBodyState {
        &self.truth
    }

    pub fn yaw_controller(&self) -> &YawController {
        &self.yaw
    }

    /// Index of the next record.
    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step > self.scn.steps()
    }

    fn estimate(&mut self, z: &GpsSample) -> (f64, f64, f64, f64) {
        let ts = self.scn.ts;
        let p = &self.scn.vehicle;
        let (sp, sv) = {
            let g = &self.scn.gps;
            (g.sigma_pos * g.sigma_pos, g.sigma_vel * g.sigma_vel)
        };
        let kf = match &self.kf {
            None => KfState::from_sample(z, sp.max(1e-12), sv.max(1e-12)),
            Some(prev) => {
                let q = kf_process_noise(ts, self.scn.speed_filter.accel_psd);
                let r = Matrix4::from_diagonal(&nalgebra::Vector4::new(sp, sv, sp, sv));
                kf_predict_update(prev, ts, z, &q, &r, self.scn.speed_filter.rows)
            }
        };
        let u_est = kf.speed();
        let ekf = match &self.ekf {
            // heading is not measured; seed it from the velocity direction
            None => EkfState::new(Vector3::new(z.x, z.y, math::atan2(z.vy, z.vx)), &self.scn.ekf),
            Some(prev) => ekf_step(prev, self.ekf_inputs.0, self.ekf_inputs.1, ts, p.wheelbase, z),
        };
        let (rx, ry, psi) = (ekf.x[0], ekf.x[1], ekf.x[2]);
        self.kf = Some(kf);
        self.ekf = Some(ekf);
        (rx + p.lr * math::cos(psi), ry + p.lr * math::sin(psi), psi, u_est)
    }

    fn yaw_rate(&mut self, psi_est: f64) -> f64 {
        let ts = self.scn.ts;
        let unwrapped = match self.psi_history.last() {
            Some(&prev) => prev + wrap_angle(psi_est - prev),
            None => psi_est,
        };
        self.psi_history.push(unwrapped);
        let h = &self.psi_history;
        match self.scn.yaw_rate.source {
            YawRateSource::Truth => self.truth.gamma,
            YawRateSource::EkfDifference => match h.len() {
                0 | 1 => 0.0,
                n => (h[n - 1] - h[n - 2]) / ts,
            },
            YawRateSource::EkfSavgol => {
                let f = self.yaw_savgol.as_ref().expect("built for this source");
                let w = f.window();
                if h.len() < w {
                    return match h.len() {
                        0 | 1 => 0.0,
                        n => (h[n - 1] - h[n - 2]) / ts,
                    };
                }
                let half = (w / 2) as f64;
                f.derivative_at(&h[h.len() - w..], half).expect("window length matches") / ts
            }
        }
    }

    /// Runs one control period and returns its record, or `None` once the
    /// run is complete.
    pub fn step(&mut self) -> Result<Option<TraceRow>> {
        let steps = self.scn.steps();
        if self.step > steps {
            return Ok(None);
        }
        let k = self.step;
        let ts = self.scn.ts;
        let t = k as f64 * ts;
        let params = self.scn.vehicle;

        // sense
        let z = self.gps.sample(t, &self.truth, &params);
        let delta_meas = self.steering.measure(self.delta_prev, self.truth.delta);

        // estimate
        let (x_est, y_est, psi_est, u_est) = self.estimate(&z);
        let gamma_meas = self.yaw_rate(psi_est);

        // control
        let reference = self.scn.trajectory.sample(t);
        let pose = Pose {
            x: x_est,
            y: y_est,
            psi: psi_est,
        };
        let (u_ref, gamma_ref) = kinematic_control(&reference, &pose, &self.scn.kinematic);
        let accel = self.pid.step(u_ref, u_est, ts);
        let ys: YawStep = self.yaw.step(gamma_ref, gamma_meas, ts);
        self.ekf_inputs = (u_est, delta_meas);

        let (e_lon, e_lat) = path_errors(&self.path, k, self.truth.x, self.truth.y);
        let learn = ys.learn.unwrap_or_default();
        let row = TraceRow {
            t,
            x_ref: reference.x,
            y_ref: reference.y,
            x_dot_ref: reference.x_dot,
            y_dot_ref: reference.y_dot,
            x: self.truth.x,
            y: self.truth.y,
            psi: self.truth.psi,
            u: self.truth.u,
            v: self.truth.v,
            gamma: self.truth.gamma,
            delta: self.truth.delta,
            x_est,
            y_est,
            psi_est,
            u_est,
            gamma_meas,
            delta_meas,
            u_ref,
            gamma_ref,
            accel,
            steer_cmd: ys.command,
            tau: ys.pd.tau,
            tau_n: learn.tau_n,
            tau_c: if ys.learn.is_some() { learn.tau_c } else { ys.pd.tau },
            v_c: if ys.learn.is_some() { learn.v_c } else { 0.5 * ys.pd.tau * ys.pd.tau },
            s_p: ys.s_p,
            v_p: ys.v_p,
            q: self.yaw.network().map_or(0.0, |n| n.q),
            drift_lower: learn.drift_lower,
            drift_upper: learn.drift_upper,
            e_lon,
            e_lat,
        };

        // actuate
        if k < steps {
            self.delta_prev = self.truth.delta;
            self.truth = plant_step_with(&self.truth, ys.command, accel, &params, ts, self.substeps)
                .map_err(|e| Error::SimDiverged {
                    step: k,
                    reason: e.to_string(),
                })?;
            self.check_bounds(k)?;
        }
        self.step += 1;
        self.last = Some(row);
        Ok(Some(row))
    }

    fn check_bounds(&self, k: usize) -> Result<()> {
        let s = &self.truth;
        let limit = 10.0 * self.scn.trajectory.extent().max(1.0);
        let finite = [s.x, s.y, s.psi, s.u, s.v, s.gamma, s.delta].iter().all(|v| v.is_finite());
        let reason = if !finite {
            Some("non-finite state".to_string())
        } else if math::hypot(s.x, s.y) > limit {
            Some(format!("position ({:.2}, {:.2}) beyond {limit} m", s.x, s.y))
        } else if s.gamma.abs() > MAX_YAW_RATE {
            Some(format!("yaw rate {:.3} rad/s", s.gamma))
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::SimDiverged { step: k + 1, reason }),
            None => Ok(()),
        }
    }

    pub fn meta(&self) -> TraceMeta {
        TraceMeta {
            schema: SCHEMA_VERSION,
            mode: self.scn.mode,
            ts: self.scn.ts,
            period: self.scn.trajectory.period(),
            laps: self.scn.laps(),
            seeds: self.scn.seeds,
        }
    }
}

/// Runs a scenario to completion.
pub fn run_scenario(scn: &Scenario) -> Result<(SimTrace, Metrics)> {
    let trace = simulate(scn)?;
    let metrics = compute_metrics(&trace, None)?;
    Ok((trace, metrics))
}

/// Runs a scenario and returns only the trace.
pub fn simulate(scn: &Scenario) -> Result<SimTrace> {
    let mut sim = Simulation::new(scn)?;
    let mut rows = Vec::with_capacity(scn.steps() + 1);
    while let Some(row) = sim.step()? {
        rows.push(row);
    }
    Ok(SimTrace { meta: sim.meta(), rows })
}
