//! Scenario runner: reference generation, the closed loop, telemetry and
//! metrics.

pub mod invariants;
pub mod metrics;
pub mod runner;
pub mod scenario;
pub mod trace;
pub mod trajectory;

pub use invariants::{check_invariants, InvariantReport};
pub use metrics::{compute_metrics, LapMetrics, Metrics};
pub use runner::{run_scenario, simulate, Simulation};
pub use scenario::Scenario;
pub use trace::{SimTrace, TraceRow};
pub use trajectory::{figure_eight, Trajectory};
