//! Online sliding-mode adaptation of the type-2 network.
//!
//! The learning error `τc = τn + τ` is treated as a sliding surface. Centres
//! follow the inputs, widths move so that every membership grade scales by
//! the same factor (leaving the normalized firing levels stationary), and
//! the consequents and `q` are driven so that `τn` moves against `sgn(τc)`.
//! The continuous-time laws are applied with forward Euler at the control
//! period, with the signum of `τc` replaced by `τc / (|τc| + δs)`.

use serde::{Deserialize, Serialize};

use crate::fuzzy::{dot, FiringStrengths, MfGrade, T2FnnState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    /// Learning gain α.
    pub alpha: f64,
    /// Slope χ of the tracking surface `Sp = ė + χ e`.
    pub chi: f64,
    /// Boundary-layer width of the smoothed signum.
    pub delta_s: f64,
    /// Smallest magnitude any update-law denominator may take.
    pub denom_floor: f64,
    /// Proportional gain of the companion PD controller.
    pub kp: f64,
    /// Derivative gain of the companion PD controller.
    pub kd: f64,
    /// Asserted bound on |τ|.
    pub b_tau: f64,
    /// Asserted bound on |τ̇|; α must exceed it.
    pub b_tau_dot: f64,
    pub width_floor: f64,
    /// Upper clamp on widths. The width laws blow up in finite time when a
    /// grade approaches 1; the clamp keeps the state finite.
    pub width_ceiling: f64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        let kp = 2.0;
        // kD·ė on a differenced heading is mostly GPS noise; a small kD keeps
        // the PD output out of saturation.
        let kd = 0.05;
        Self {
            alpha: 0.05,
            chi: kp / kd,
            delta_s: 0.05,
            denom_floor: 1e-3,
            kp,
            kd,
            b_tau: 1.0,
            b_tau_dot: 0.02,
            width_floor: 2e-3,
            width_ceiling: 1e3,
        }
    }
}

impl LearnConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidLearnConfig(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.alpha > self.b_tau_dot) {
            return bad(format!(
                "alpha = {} must exceed the asserted bound on |dτ/dt| = {}",
                self.alpha, self.b_tau_dot
            ));
        }
        if !(self.delta_s > 0.0) || !(self.denom_floor > 0.0) {
            return bad("delta_s and denom_floor must be positive".into());
        }
        if !(self.kp >= 0.0 && self.kd > 0.0) {
            return bad("PD gains need kp >= 0 and kd > 0".into());
        }
        if !(self.chi > 0.0) || (self.chi - self.kp / self.kd).abs() > 1e-12 * self.chi {
            return bad(format!(
                "chi = {} must be positive and equal kp/kd = {}",
                self.chi,
                self.kp / self.kd
            ));
        }
        if !(self.width_floor > 0.0 && self.width_ceiling > self.width_floor) {
            return bad("need 0 < width_floor < width_ceiling".into());
        }
        Ok(())
    }
}

/// Inputs of the network together with their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NetworkInputs {
    pub x1: f64,
    pub x2: f64,
    pub x1_dot: f64,
    pub x2_dot: f64,
}

/// Diagnostics of one learning step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LearnSignals {
    /// Control signal entering the coupling `τc = τn + τ`.
    pub tau: f64,
    pub tau_n: f64,
    pub tau_c: f64,
    /// `τc² / 2`
    pub v_c: f64,
    /// Change of the normalized lower firing levels across the step (L2).
    pub drift_lower: f64,
    pub drift_upper: f64,
    /// `q` hit a bound this step and its update was cut off there.
    pub q_clamped: bool,
}

/// Chattering-free replacement of `sgn(τc)`.
pub fn smooth_sign(tau_c: f64, delta_s: f64) -> f64 {
    tau_c / (tau_c.abs() + delta_s)
}

fn exact_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `x` with its magnitude raised to at least `floor`, keeping the sign
/// (zero counts as positive).
fn floored(x: f64, floor: f64) -> f64 {
    if x.abs() >= floor {
        x
    } else if x < 0.0 {
        -floor
    } else {
        floor
    }
}

/// Rate of one width: `μ (-α d² / (x - c)) sgn(τc) sgn((x - c) / d)`.
fn width_rate(mu: f64, width: f64, offset: f64, sign_tc: f64, cfg: &LearnConfig) -> f64 {
    let den = floored(offset, cfg.denom_floor);
    mu * (-cfg.alpha * width * width / den) * sign_tc * exact_sign(offset)
}

/// Centre laws: every centre moves with its input.
pub fn update_centers(state: &mut T2FnnState, x1_dot: f64, x2_dot: f64, dt: f64) {
    for mf in &mut state.mfs_x1 {
        mf.center += x1_dot * dt;
    }
    for mf in &mut state.mfs_x2 {
        mf.center += x2_dot * dt;
    }
}

/// Width laws for all four width families, followed by the floor/ceiling
/// clamp and re-imposing `width_lower <= width_upper`.
pub fn update_widths(state: &mut T2FnnState, fs: &FiringStrengths, tau_c: f64, cfg: &LearnConfig, dt: f64) {
    let s = smooth_sign(tau_c, cfg.delta_s);
    let step = |mfs: &mut [crate::fuzzy::Type2TriangularMf], grades: &[MfGrade]| {
        for (mf, g) in mfs.iter_mut().zip(grades) {
            let lower = mf.width_lower + dt * width_rate(g.lower, mf.width_lower, g.offset, s, cfg);
            let upper = mf.width_upper + dt * width_rate(g.upper, mf.width_upper, g.offset, s, cfg);
            mf.width_upper = upper.clamp(cfg.width_floor, cfg.width_ceiling);
            mf.width_lower = lower.clamp(cfg.width_floor, cfg.width_ceiling).min(mf.width_upper);
        }
    };
    step(&mut state.mfs_x1, &fs.grades_x1);
    step(&mut state.mfs_x2, &fs.grades_x2);
}

fn consequent_rates(q: f64, fs: &FiringStrengths, sign_tc: f64, cfg: &LearnConfig) -> Vec<f64> {
    let mix = fs.mix(q);
    let den = dot(&mix, &mix).max(cfg.denom_floor);
    mix.iter().map(|m| -m * cfg.alpha * sign_tc / den).collect()
}

fn q_rate(consequents: &[f64], fs: &FiringStrengths, sign_tc: f64, cfg: &LearnConfig) -> f64 {
    let spread: f64 = consequents
        .iter()
        .zip(fs.wt_lower.iter().zip(&fs.wt_upper))
        .map(|(f, (l, u))| f * (l - u))
        .sum();
    -cfg.alpha * sign_tc / floored(spread, cfg.denom_floor)
}

/// Consequent law: `ḟ = -mix α sgn(τc) / ⟨mix, mix⟩` with
/// `mix = q W̃lower + (1 - q) W̃upper`.
pub fn update_consequents(state: &mut T2FnnState, fs: &FiringStrengths, tau_c: f64, cfg: &LearnConfig, dt: f64) {
    let rates = consequent_rates(state.q, fs, smooth_sign(tau_c, cfg.delta_s), cfg);
    for (f, r) in state.consequents.iter_mut().zip(rates) {
        *f += dt * r;
    }
}

fn apply_q(q: f64, rate: f64, dt: f64) -> (f64, bool) {
    let next = q + dt * rate;
    if (0.0..=1.0).contains(&next) {
        (next, false)
    } else {
        (next.clamp(0.0, 1.0), true)
    }
}

/// Mixing-weight law `q̇ = -α sgn(τc) / (F · (W̃lower - W̃upper))`, clamped to
/// `[0, 1]`. Returns `true` when the bound cut the update off.
pub fn update_q(state: &mut T2FnnState, fs: &FiringStrengths, tau_c: f64, cfg: &LearnConfig, dt: f64) -> bool {
    let rate = q_rate(&state.consequents, fs, smooth_sign(tau_c, cfg.delta_s), cfg);
    let (q, clamped) = apply_q(state.q, rate, dt);
    state.q = q;
    clamped
}

fn l2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// One learning step.
///
/// Evaluates `τn`, forms `τc = τn + tau` and applies the centre, width,
/// consequent and `q` updates in that order. Every rate is computed from the
/// parameters and firing strengths at the start of the step. The drift
/// diagnostics compare the normalized firing levels before the step with
/// those of the updated network at the advanced inputs `x + ẋ dt`.
pub fn learn_step(
    state: &mut T2FnnState,
    inputs: NetworkInputs,
    tau: f64,
    cfg: &LearnConfig,
    dt: f64,
) -> LearnSignals {
    let fs = state.fire(inputs.x1, inputs.x2, cfg.denom_floor);
    let tau_n = state.infer(&fs);
    let tau_c = tau_n + tau;
    let s = smooth_sign(tau_c, cfg.delta_s);

    let f_rates = consequent_rates(state.q, &fs, s, cfg);
    let q_rate = q_rate(&state.consequents, &fs, s, cfg);

    update_centers(state, inputs.x1_dot, inputs.x2_dot, dt);
    update_widths(state, &fs, tau_c, cfg, dt);
    for (f, r) in state.consequents.iter_mut().zip(f_rates) {
        *f += dt * r;
    }
    let (q, q_clamped) = apply_q(state.q, q_rate, dt);
    state.q = q;

    let after = state.fire(
        inputs.x1 + inputs.x1_dot * dt,
        inputs.x2 + inputs.x2_dot * dt,
        cfg.denom_floor,
    );
    LearnSignals {
        tau,
        tau_n,
        tau_c,
        v_c: 0.5 * tau_c * tau_c,
        drift_lower: l2_diff(&after.wt_lower, &fs.wt_lower),
        drift_upper: l2_diff(&after.wt_upper, &fs.wt_upper),
        q_clamped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::{NetworkConfig, Type2TriangularMf};

    fn net() -> T2FnnState {
        let mut n = T2FnnState::new(&NetworkConfig::default()).unwrap();
        n.consequents = vec![0.3, -0.1, 0.2, 0.5, 0.0, -0.4, 0.1, 0.25, -0.2];
        n
    }

    #[test]
    fn smooth_sign_values() {
        assert_eq!(smooth_sign(0.0, 0.05), 0.0);
        assert_eq!(smooth_sign(0.05, 0.05), 0.5);
        assert!((smooth_sign(1e6, 0.05) - 1.0).abs() < 1e-4);
        assert!((smooth_sign(-1e6, 0.05) + 1.0).abs() < 1e-4);
        assert_eq!(smooth_sign(-0.3, 0.05), -smooth_sign(0.3, 0.05));
    }

    #[test]
    fn centers_shift_linearly() {
        let mut a = net();
        update_centers(&mut a, 0.0, 0.0, 0.05);
        assert_eq!(a, net());
        update_centers(&mut a, 1.0, -2.0, 0.05);
        for (mf, orig) in a.mfs_x1.iter().zip(&net().mfs_x1) {
            assert!((mf.center - orig.center - 0.05).abs() < 1e-15);
        }
        let mut b = net();
        update_centers(&mut b, 1.0, -2.0, 0.05);
        update_centers(&mut b, 1.0, -2.0, 0.05);
        let mut c = net();
        update_centers(&mut c, 1.0, -2.0, 0.1);
        for (x, y) in b.mfs_x2.iter().zip(&c.mfs_x2) {
            assert!((x.center - y.center).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_learning_error_is_a_fixed_point() {
        let cfg = LearnConfig::default();
        let mut n = net();
        let fs = n.fire(0.3, -0.7, cfg.denom_floor);
        update_widths(&mut n, &fs, 0.0, &cfg, 0.05);
        update_consequents(&mut n, &fs, 0.0, &cfg, 0.05);
        update_q(&mut n, &fs, 0.0, &cfg, 0.05);
        assert_eq!(n, net());
    }

    #[test]
    fn unfired_mf_keeps_its_width() {
        let cfg = LearnConfig::default();
        let mut n = net();
        // x1 = -1 sits outside the support of the MF centred at +1
        let fs = n.fire(-1.0, 0.4, cfg.denom_floor);
        assert_eq!(fs.grades_x1[2].upper, 0.0);
        let before = n.mfs_x1[2];
        update_widths(&mut n, &fs, 0.8, &cfg, 0.05);
        assert_eq!(n.mfs_x1[2], before);
    }

    #[test]
    fn single_width_hand_evaluation() {
        // x = 0.4, c = 0, d = 1 (lower), mu = 0.6, tau_c = 0.45, alpha = 2
        // s = 0.45 / 0.5 = 0.9; rate = 0.6 * (-2 * 1 / 0.4) * 0.9 * 1 = -2.7
        // Euler with dt = 0.01: d' = 1 - 0.027 = 0.973
        let cfg = LearnConfig {
            alpha: 2.0,
            ..Default::default()
        };
        let mut n = net();
        n.mfs_x1[1] = Type2TriangularMf::new(0.0, 1.0, 2.0).unwrap();
        let fs = n.fire(0.4, 0.0, cfg.denom_floor);
        update_widths(&mut n, &fs, 0.45, &cfg, 0.01);
        assert!((n.mfs_x1[1].width_lower - 0.973).abs() < 1e-12);
        // upper: mu = 0.8, d = 2: 0.8 * (-2 * 4 / 0.4) * 0.9 = -14.4 -> 2 - 0.144
        assert!((n.mfs_x1[1].width_upper - 1.856).abs() < 1e-12);
    }

    #[test]
    fn width_clamps_hold() {
        let cfg = LearnConfig {
            alpha: 50.0,
            b_tau_dot: 1.0,
            ..Default::default()
        };
        let mut n = net();
        for k in 0..200 {
            let x1 = 0.37 + 0.001 * k as f64;
            let fs = n.fire(x1, -0.2, cfg.denom_floor);
            let tc = if k % 3 == 0 { -2.0 } else { 2.0 };
            update_widths(&mut n, &fs, tc, &cfg, 0.05);
            for mf in n.mfs_x1.iter().chain(&n.mfs_x2) {
                assert!(mf.width_lower >= cfg.width_floor);
                assert!(mf.width_upper <= cfg.width_ceiling);
                assert!(mf.width_lower <= mf.width_upper);
            }
        }
    }

    #[test]
    fn one_hot_consequent_update() {
        let cfg = LearnConfig::default();
        let mut n = net();
        // exactly on the (1, 2) peak with MFs that do not overlap there
        for mf in n.mfs_x1.iter_mut().chain(n.mfs_x2.iter_mut()) {
            mf.width_lower = 0.5;
            mf.width_upper = 0.5;
        }
        let fs = n.fire(0.0, 10.0, cfg.denom_floor);
        let before = n.consequents.clone();
        update_consequents(&mut n, &fs, 0.2, &cfg, 0.05);
        let expected = -cfg.alpha * smooth_sign(0.2, cfg.delta_s) * 0.05;
        for k in 0..9 {
            let delta = n.consequents[k] - before[k];
            if k == 5 {
                assert!((delta - expected).abs() < 1e-15);
            } else {
                assert_eq!(delta, 0.0);
            }
        }
    }

    #[test]
    fn q_clamps_at_bounds() {
        let cfg = LearnConfig::default();
        let mut n = net();
        n.q = 1.0;
        let fs = n.fire(0.2, 0.3, cfg.denom_floor);
        // pick the sign of tau_c that pushes q upwards
        let spread: f64 = (0..9).map(|k| n.consequents[k] * (fs.wt_lower[k] - fs.wt_upper[k])).sum();
        let tc = if spread > 0.0 { -1.0 } else { 1.0 };
        assert!(update_q(&mut n, &fs, tc, &cfg, 0.05));
        assert_eq!(n.q, 1.0);
    }

    #[test]
    fn learn_step_fixed_point() {
        let cfg = LearnConfig::default();
        let mut n = T2FnnState::new(&NetworkConfig::default()).unwrap();
        let before = n.clone();
        let sig = learn_step(&mut n, NetworkInputs { x1: 0.2, x2: -0.1, ..Default::default() }, 0.0, &cfg, 0.05);
        assert_eq!(sig.tau_c, 0.0);
        assert_eq!(n, before);
    }

    #[test]
    fn config_validation() {
        assert!(LearnConfig::default().validate().is_ok());
        let c = LearnConfig {
            alpha: 0.01,
            b_tau_dot: 0.02,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = LearnConfig {
            chi: 3.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
