//! Time-parameterized reference paths.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::control::RefPoint;
use crate::{Error, Result};

/// Figure-eight Lissajous reference: `x = Ax sin(2πt/T)`, `y = Ay sin(4πt/T)`.
pub fn figure_eight(t: f64, ax: f64, ay: f64, period: f64) -> RefPoint {
    let w = TAU / period;
    let (s1, c1) = math::sin_cos(w * t);
    let (s2, c2) = math::sin_cos(2.0 * w * t);
    RefPoint {
        t,
        x: ax * s1,
        y: ay * s2,
        x_dot: ax * w * c1,
        y_dot: 2.0 * ay * w * c2,
    }
}

/// Reference description as it appears in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trajectory {
    FigureEight {
        ax: f64,
        ay: f64,
        period: f64,
    },
    /// Piecewise-linear path through `(t, x, y)` knots. Either `points` is
    /// given inline or `file` names a CSV with a `t,x,y` header, resolved
    /// relative to the scenario file.
    Waypoints {
        #[serde(default)]
        points: Vec<[f64; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
    },
}

impl Default for Trajectory {
    fn default() -> Self {
        Trajectory::FigureEight {
            ax: 20.0,
            ay: 10.0,
            period: 120.0,
        }
    }
}

#[derive(Debug, Deserialize)]
struct WaypointRow {
    t: f64,
    x: f64,
    y: f64,
}

impl Trajectory {
    /// Loads a waypoint file into inline points.
    pub fn resolve(&mut self, base_dir: &Path) -> Result<()> {
        if let Trajectory::Waypoints { points, file } = self {
            if let Some(name) = file.take() {
                let mut rdr = csv::Reader::from_path(base_dir.join(&name))?;
                let mut loaded = Vec::new();
                for row in rdr.deserialize() {
                    let r: WaypointRow = row?;
                    loaded.push([r.t, r.x, r.y]);
                }
                points.extend(loaded);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Trajectory::FigureEight { ax, ay, period } => {
                if !(*period > 0.0 && ax.is_finite() && ay.is_finite() && period.is_finite()) {
                    return Err(Error::InvalidScenario("figure-eight needs a positive period".into()));
                }
            }
            Trajectory::Waypoints { points, file } => {
                if file.is_some() {
                    return Err(Error::InvalidScenario("waypoint file was not resolved".into()));
                }
                if points.len() < 2 {
                    return Err(Error::InvalidScenario("need at least two waypoints".into()));
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return Err(Error::InvalidScenario("waypoint times must increase strictly".into()));
                }
                if points.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidScenario("waypoints must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Length of one lap [s].
    pub fn period(&self) -> f64 {
        match self {
            Trajectory::FigureEight { period, .. } => *period,
            Trajectory::Waypoints { points, .. } => match (points.first(), points.last()) {
                (Some(a), Some(b)) => b[0] - a[0],
                _ => 0.0,
            },
        }
    }

    /// Largest coordinate magnitude the reference reaches.
    pub fn extent(&self) -> f64 {
        match self {
            Trajectory::FigureEight { ax, ay, .. } => ax.abs().max(ay.abs()),
            Trajectory::Waypoints { points, .. } => points
                .iter()
                .map(|p| p[1].abs().max(p[2].abs()))
                .fold(0.0, f64::max),
        }
    }

    pub fn sample(&self, t: f64) -> RefPoint {
        match self {
            Trajectory::FigureEight { ax, ay, period } => figure_eight(t, *ax, *ay, *period),
            Trajectory::Waypoints { points, .. } => waypoint_sample(points, t),
        }
    }
}

/// Linear interpolation between knots; holds the end points outside the
/// time span with zero velocity.
fn waypoint_sample(points: &[[f64; 3]], t: f64) -> RefPoint {
    let first = points[0];
    let last = points[points.len() - 1];
    if t <= first[0] {
        return RefPoint { t, x: first[1], y: first[2], ..Default::default() };
    }
    if t >= last[0] {
        return RefPoint { t, x: last[1], y: last[2], ..Default::default() };
    }
    let k = points.partition_point(|p| p[0] <= t) - 1;
    let (a, b) = (points[k], points[k + 1]);
    let dt = b[0] - a[0];
    let s = (t - a[0]) / dt;
    RefPoint {
        t,
        x: a[1] + s * (b[1] - a[1]),
        y: a[2] + s * (b[2] - a[2]),
        x_dot: (b[1] - a[1]) / dt,
        y_dot: (b[2] - a[2]) / dt,
    }
}
