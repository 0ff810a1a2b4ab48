//! Whole-run safety and consistency checks.

use crate::control::ControllerMode;
use crate::fuzzy::T2FnnState;
use crate::learning::LearnConfig;
use crate::Result;

use super::runner::{simulate, Simulation};
use super::scenario::Scenario;
use super::trace::{SimTrace, TraceRow};

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InvariantReport {
    pub checks: Vec<InvariantCheck>,
}

impl InvariantReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: String) {
        self.checks.push(InvariantCheck { name, passed, detail });
    }
}

impl std::fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// First violation of the per-step network invariants, if any.
pub fn network_violation(net: &T2FnnState, cfg: &LearnConfig) -> Option<String> {
    if !(0.0..=1.0).contains(&net.q) {
        return Some(format!("q = {}", net.q));
    }
    for (axis, mfs) in [("x1", &net.mfs_x1), ("x2", &net.mfs_x2)] {
        for (i, mf) in mfs.iter().enumerate() {
            if !(mf.width_lower <= mf.width_upper) {
                return Some(format!("{axis}[{i}]: d_lower {} > d_upper {}", mf.width_lower, mf.width_upper));
            }
            if !(mf.width_lower >= cfg.width_floor) {
                return Some(format!("{axis}[{i}]: width {} below floor", mf.width_lower));
            }
        }
    }
    None
}

/// `|Sc - kD Sp|` of one record, with `Sc` the learning error.
pub fn surface_mismatch(row: &TraceRow, cfg: &LearnConfig) -> f64 {
    (row.tau_c - cfg.kd * row.s_p).abs()
}

/// Total `|Δq|` over the steps in the top and bottom deciles of `|dγ_ref/dt|`.
pub fn q_motion_by_transient(trace: &SimTrace) -> (f64, f64) {
    let rows = &trace.rows;
    if rows.len() < 20 {
        return (0.0, 0.0);
    }
    let mut steps: Vec<(f64, f64)> = rows
        .windows(2)
        .map(|w| {
            let dt = w[1].t - w[0].t;
            (((w[1].gamma_ref - w[0].gamma_ref) / dt).abs(), (w[1].q - w[0].q).abs())
        })
        .collect();
    steps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = steps.len() / 10;
    let bottom = steps[..n].iter().map(|s| s.1).sum();
    let top = steps[steps.len() - n..].iter().map(|s| s.1).sum();
    (top, bottom)
}

/// Runs `scn` step by step checking the per-step invariants, then reruns it
/// for determinism and, in learning mode, checks the PD-only isolation and
/// where `q` moves.
pub fn check_invariants(scn: &Scenario) -> Result<InvariantReport> {
    let mut report = InvariantReport::default();
    let mut sim = Simulation::new(scn)?;
    let cfg = scn.learning;
    let tol = 1e-12;

    let mut rows = Vec::with_capacity(scn.steps() + 1);
    let mut net_fail: Option<String> = None;
    let mut worst_surface = 0.0f64;
    let mut surface_fail: Option<String> = None;
    while let Some(row) = sim.step()? {
        if let Some(net) = sim.yaw_controller().network() {
            if net_fail.is_none() {
                net_fail = network_violation(net, &cfg).map(|m| format!("step {}: {m}", rows.len()));
            }
        }
        let mis = surface_mismatch(&row, &cfg);
        worst_surface = worst_surface.max(mis);
        if surface_fail.is_none() && mis > tol * row.tau_c.abs().max(1.0) {
            surface_fail = Some(format!("step {}: |Sc - kD Sp| = {mis:e}", rows.len()));
        }
        rows.push(row);
    }
    let trace = SimTrace { meta: sim.meta(), rows };

    let count_ok = trace.rows.len() == scn.steps() + 1 && trace.rows.windows(2).all(|w| w[1].t > w[0].t);
    report.push(
        "record count and time order",
        count_ok,
        format!("{} records for {} steps", trace.rows.len(), scn.steps()),
    );
    report.push(
        "network bounds",
        net_fail.is_none(),
        net_fail.unwrap_or_else(|| "q in [0,1], d_lower <= d_upper, widths >= floor".into()),
    );
    report.push(
        "learning surface",
        surface_fail.is_none(),
        surface_fail.unwrap_or_else(|| format!("max |Sc - kD Sp| = {worst_surface:e}")),
    );

    let first = trace.to_csv_string()?;
    let second = simulate(scn)?.to_csv_string()?;
    report.push(
        "determinism",
        first == second,
        format!("{} bytes, identical = {}", first.len(), first == second),
    );

    if scn.mode == ControllerMode::PdPlusT2fnn {
        let base = scn.clone().with_mode(ControllerMode::PdOnly);
        let mut altered = base.clone();
        altered.learning.alpha *= 3.0;
        altered.network.rows += 2;
        altered.network.initial_q = 0.9;
        let same = simulate(&base)?.to_csv_string()? == simulate(&altered)?.to_csv_string()?;
        report.push(
            "pd-only isolation",
            same,
            "pd-only trace ignores the network configuration".into(),
        );

        let (top, bottom) = q_motion_by_transient(&trace);
        report.push(
            "q moves on transients",
            top > bottom,
            format!("sum |dq| top decile {top:.4e}, bottom decile {bottom:.4e}"),
        );
    }
    Ok(report)
}
