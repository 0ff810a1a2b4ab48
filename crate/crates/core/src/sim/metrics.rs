//! Path-frame tracking errors and their mean squares.

use serde::Serialize;

use crate::math;
use crate::{Error, Result};

use super::trace::SimTrace;

/// Half-width, in samples, of the window searched for the closest reference
/// segment. Keeps the projection on the right branch where the figure-eight
/// crosses itself.
pub const PROJECTION_WINDOW: usize = 200;

/// Reference sample used for projection: position and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathSample {
    pub x: f64,
    pub y: f64,
    pub x_dot: f64,
    pub y_dot: f64,
}

/// Along-track and signed cross-track error of `(px, py)` against the
/// reference at sample `k`.
///
/// The along-track error is the offset to the current desired point
/// projected on its tangent. The cross-track error is the distance to the
/// closest point of the reference polyline within the search window, positive
/// when the vehicle is left of the path.
pub fn path_errors(path: &[PathSample], k: usize, px: f64, py: f64) -> (f64, f64) {
    let r = path[k];
    let speed = math::hypot(r.x_dot, r.y_dot);
    let e_lon = if speed > 0.0 {
        ((r.x - px) * r.x_dot + (r.y - py) * r.y_dot) / speed
    } else {
        0.0
    };

    let lo = k.saturating_sub(PROJECTION_WINDOW);
    let hi = (k + PROJECTION_WINDOW).min(path.len() - 1);
    let mut best = (f64::INFINITY, 0.0);
    for i in lo..hi.max(lo + 1) {
        let a = path[i];
        let b = path[(i + 1).min(path.len() - 1)];
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len2 = dx * dx + dy * dy;
        let (tx, ty, s) = if len2 > 0.0 {
            let s = (((px - a.x) * dx + (py - a.y) * dy) / len2).clamp(0.0, 1.0);
            (dx, dy, s)
        } else {
            (a.x_dot, a.y_dot, 0.0)
        };
        let (cx, cy) = (a.x + s * dx, a.y + s * dy);
        let dist2 = (px - cx) * (px - cx) + (py - cy) * (py - cy);
        if dist2 < best.0 {
            let cross = tx * (py - cy) - ty * (px - cx);
            best = (dist2, if cross < 0.0 { -dist2.sqrt() } else { dist2.sqrt() });
        }
    }
    (e_lon, best.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LapMetrics {
    pub lateral_mse: f64,
    pub longitudinal_mse: f64,
    pub yaw_rate_mse: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub lateral_mse: f64,
    pub longitudinal_mse: f64,
    pub yaw_rate_mse: f64,
    pub laps: Vec<LapMetrics>,
    /// `lateral_mse / baseline.lateral_mse`; below 1 is an improvement.
    pub improvement_ratio: Option<f64>,
}

#[derive(Default, Clone, Copy)]
struct Acc {
    lat: f64,
    lon: f64,
    yaw: f64,
    n: usize,
}

impl Acc {
    fn add(&mut self, lat: f64, lon: f64, yaw: f64) {
        self.lat += lat * lat;
        self.lon += lon * lon;
        self.yaw += yaw * yaw;
        self.n += 1;
    }

    fn finish(self) -> LapMetrics {
        let n = self.n.max(1) as f64;
        LapMetrics {
            lateral_mse: self.lat / n,
            longitudinal_mse: self.lon / n,
            yaw_rate_mse: self.yaw / n,
            samples: self.n,
        }
    }
}

/// Lap index of a sample; the closing sample of the run joins the last lap.
pub fn lap_of(t: f64, period: f64, laps: usize) -> usize {
    (((t / period) + 1e-9).floor() as usize).min(laps.saturating_sub(1))
}

pub fn trace_path(trace: &SimTrace) -> Vec<PathSample> {
    trace
        .rows
        .iter()
        .map(|r| PathSample {
            x: r.x_ref,
            y: r.y_ref,
            x_dot: r.x_dot_ref,
            y_dot: r.y_dot_ref,
        })
        .collect()
}

/// Whole-run and per-lap MSEs of the true CG against the reference, plus
/// the lateral ratio against `baseline` when given.
pub fn compute_metrics(trace: &SimTrace, baseline: Option<&SimTrace>) -> Result<Metrics> {
    if trace.rows.is_empty() {
        return Err(Error::BadTrace("empty trace".into()));
    }
    let path = trace_path(trace);
    let laps = trace.meta.laps.max(1);
    let mut total = Acc::default();
    let mut per_lap = vec![Acc::default(); laps];
    for (k, r) in trace.rows.iter().enumerate() {
        let (lon, lat) = path_errors(&path, k, r.x, r.y);
        let yaw = r.gamma_ref - r.gamma;
        total.add(lat, lon, yaw);
        per_lap[lap_of(r.t, trace.meta.period, laps)].add(lat, lon, yaw);
    }
    let total = total.finish();

    let improvement_ratio = match baseline {
        None => None,
        Some(b) => {
            check_aligned(trace, b)?;
            let base = compute_metrics(b, None)?;
            Some(total.lateral_mse / base.lateral_mse)
        }
    };
    Ok(Metrics {
        lateral_mse: total.lateral_mse,
        longitudinal_mse: total.longitudinal_mse,
        yaw_rate_mse: total.yaw_rate_mse,
        laps: per_lap.into_iter().map(Acc::finish).collect(),
        improvement_ratio,
    })
}

fn check_aligned(a: &SimTrace, b: &SimTrace) -> Result<()> {
    if a.rows.len() != b.rows.len() {
        return Err(Error::MisalignedTraces(format!(
            "{} rows vs {} rows",
            a.rows.len(),
            b.rows.len()
        )));
    }
    if let Some((k, (ra, rb))) = a
        .rows
        .iter()
        .zip(&b.rows)
        .enumerate()
        .find(|(_, (ra, rb))| (ra.t - rb.t).abs() > 1e-9 || ra.x_ref != rb.x_ref || ra.y_ref != rb.y_ref)
    {
        return Err(Error::MisalignedTraces(format!(
            "row {k}: t={} ({}, {}) vs t={} ({}, {})",
            ra.t, ra.x_ref, ra.y_ref, rb.t, rb.x_ref, rb.y_ref
        )));
    }
    Ok(())
}
