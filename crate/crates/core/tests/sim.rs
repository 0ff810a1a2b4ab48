use std::path::Path;

use proptest::prelude::*;
use tractor_t2fnn::control::ControllerMode;
use tractor_t2fnn::sim::metrics::{path_errors, PathSample};
use tractor_t2fnn::sim::trace::TraceMeta;
use tractor_t2fnn::sim::{
    compute_metrics, figure_eight, simulate, Scenario, SimTrace, Simulation, TraceRow, Trajectory,
};
use tractor_t2fnn::Error;

fn short(mode: ControllerMode) -> Scenario {
    Scenario {
        trajectory: Trajectory::FigureEight {
            ax: 20.0,
            ay: 10.0,
            period: 60.0,
        },
        duration: 60.0,
        ..Default::default()
    }
    .with_mode(mode)
}

#[test]
fn figure_eight_golden_value() {
    // python oracle
    let r = figure_eight(17.3, 20.0, 10.0, 120.0);
    let want = [15.738700439226745, 9.71134279909636, 0.6461584574478416, -0.24979165265474723];
    for (got, w) in [r.x, r.y, r.x_dot, r.y_dot].into_iter().zip(want) {
        assert!((got - w).abs() < 1e-13, "{got} vs {w}");
    }
}

#[test]
fn circle_projection_gives_radial_offset() {
    // counter-clockwise circle: the left of the path is the inside
    let radius = 5.0;
    let n = 2000;
    let path: Vec<PathSample> = (0..n)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / n as f64;
            PathSample {
                x: radius * a.cos(),
                y: radius * a.sin(),
                x_dot: -a.sin(),
                y_dot: a.cos(),
            }
        })
        .collect();
    for (k, off) in [(300, 0.1), (900, -0.25), (1500, 0.02)] {
        let a = std::f64::consts::TAU * k as f64 / n as f64;
        let (px, py) = ((radius - off) * a.cos(), (radius - off) * a.sin());
        let (lon, lat) = path_errors(&path, k, px, py);
        assert!((lat - off).abs() < 1e-4, "{lat} vs {off}");
        assert!(lon.abs() < 1e-12);
    }
}

fn offset_trace(offset: f64) -> SimTrace {
    let period = 120.0;
    let rows = (0..=2400)
        .map(|k| {
            let t = 0.05 * k as f64;
            let r = figure_eight(t, 20.0, 10.0, period);
            let s = r.x_dot.hypot(r.y_dot);
            TraceRow {
                t,
                x_ref: r.x,
                y_ref: r.y,
                x_dot_ref: r.x_dot,
                y_dot_ref: r.y_dot,
                x: r.x - offset * r.y_dot / s,
                y: r.y + offset * r.x_dot / s,
                ..Default::default()
            }
        })
        .collect();
    SimTrace {
        meta: TraceMeta {
            schema: 1,
            mode: ControllerMode::PdOnly,
            ts: 0.05,
            period,
            laps: 1,
            seeds: Default::default(),
        },
        rows,
    }
}

#[test]
fn constant_left_offset_has_known_mse() {
    let m = compute_metrics(&offset_trace(0.1), None).unwrap();
    assert!((m.lateral_mse - 0.01).abs() < 1e-6, "{}", m.lateral_mse);
    assert!(m.longitudinal_mse < 1e-20);
    assert_eq!(m.laps.len(), 1);
    assert_eq!(m.laps[0].samples, 2401);
    let ratio = compute_metrics(&offset_trace(0.05), Some(&offset_trace(0.1)))
        .unwrap()
        .improvement_ratio
        .unwrap();
    assert!((ratio - 0.25).abs() < 1e-4);
}

#[test]
fn misaligned_traces_are_rejected() {
    let a = offset_trace(0.1);
    let mut shorter = a.clone();
    shorter.rows.pop();
    assert!(matches!(compute_metrics(&a, Some(&shorter)), Err(Error::MisalignedTraces(_))));
    let mut moved = a.clone();
    moved.rows[10].x_ref += 1.0;
    assert!(matches!(compute_metrics(&a, Some(&moved)), Err(Error::MisalignedTraces(_))));
}

#[test]
fn empty_scenario_is_the_default() {
    let scn = Scenario::from_json("{}", Path::new(".")).unwrap();
    assert_eq!(scn, Scenario::default());
    assert_eq!(scn.steps(), 4800);
    assert_eq!(scn.laps(), 2);
    let back = Scenario::from_json(&scn.to_json().unwrap(), Path::new(".")).unwrap();
    assert_eq!(back, scn);
}

#[test]
fn shipped_default_scenario_loads() {
    let scn = Scenario::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/default.json")).unwrap();
    assert_eq!(scn, Scenario::default());
}

#[test]
fn scenario_typos_and_bad_values_are_rejected() {
    let dir = Path::new(".");
    assert!(Scenario::from_json(r#"{"durration": 10}"#, dir).is_err());
    assert!(Scenario::from_json(r#"{"ts": 0}"#, dir).is_err());
    assert!(Scenario::from_json(r#"{"duration": 10}"#, dir).is_err(), "shorter than one lap");
    assert!(Scenario::from_json(r#"{"mode": "lqr"}"#, dir).is_err());
}

#[test]
fn waypoints_load_from_csv_next_to_scenario() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("path.csv"), "t,x,y\n0,0,0\n10,10,0\n20,10,10\n").unwrap();
    let text = r#"{"trajectory": {"type": "waypoints", "file": "path.csv"}, "duration": 20}"#;
    std::fs::write(dir.path().join("scn.json"), text).unwrap();
    let scn = Scenario::load(dir.path().join("scn.json")).unwrap();
    assert_eq!(scn.trajectory.period(), 20.0);
    let r = scn.trajectory.sample(15.0);
    assert_eq!((r.x, r.y, r.x_dot, r.y_dot), (10.0, 5.0, 0.0, 1.0));

    let inline = r#"{"trajectory": {"type": "waypoints", "points": [[0,0,0],[0,1,1]]}}"#;
    assert!(Scenario::from_json(inline, dir.path()).is_err(), "times must increase");
}

#[test]
fn trace_csv_round_trip_is_exact() {
    let trace = simulate(&short(ControllerMode::PdPlusT2fnn)).unwrap();
    let text = trace.to_csv_string().unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schema=1 mode=pd-t2fnn"));
    assert_eq!(lines.next().unwrap().split(',').count(), 33);
    let back = SimTrace::read_csv(text.as_bytes()).unwrap();
    assert_eq!(back, trace);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    trace.save(&path).unwrap();
    assert_eq!(SimTrace::load(&path).unwrap(), trace);
}

#[test]
fn malformed_traces_are_rejected() {
    assert!(SimTrace::read_csv("t,x\n0,1\n".as_bytes()).is_err());
    let text = offset_trace(0.0).to_csv_string().unwrap();
    let header_only: String = text.lines().take(2).map(|l| format!("{l}\n")).collect();
    assert!(matches!(SimTrace::read_csv(header_only.as_bytes()), Err(Error::BadTrace(_))));
}

#[test]
fn runs_are_deterministic_and_seeded() {
    let scn = short(ControllerMode::PdPlusT2fnn);
    let a = simulate(&scn).unwrap();
    assert_eq!(a, simulate(&scn).unwrap());
    assert_ne!(a, simulate(&scn.clone().with_seed(77)).unwrap());
}

#[test]
fn stepping_yields_one_record_per_period_plus_one() {
    let scn = short(ControllerMode::PdOnly);
    let mut sim = Simulation::new(&scn).unwrap();
    let mut n = 0;
    while let Some(row) = sim.step().unwrap() {
        assert!((row.t - 0.05 * n as f64).abs() < 1e-9);
        n += 1;
    }
    assert!(sim.is_done());
    assert_eq!(n, scn.steps() + 1);
}

#[test]
fn noise_free_pd_tracks_the_figure_eight() {
    // one lap at the default pace; at twice the speed the speed loop lags
    let mut scn = Scenario {
        duration: 120.0,
        ..Default::default()
    }
    .with_mode(ControllerMode::PdOnly);
    scn.gps.sigma_pos = 0.0;
    scn.gps.sigma_vel = 0.0;
    scn.steering_sensor.noise_sigma = 0.0;
    let m = compute_metrics(&simulate(&scn).unwrap(), None).unwrap();
    assert!(m.lateral_mse < 0.02, "lateral mse {}", m.lateral_mse);
    assert!(m.longitudinal_mse < 0.02, "longitudinal mse {}", m.longitudinal_mse);
}

#[test]
fn learning_improves_second_lap_lateral_error() {
    let scn = Scenario::default();
    let pd = compute_metrics(&simulate(&scn.clone().with_mode(ControllerMode::PdOnly)).unwrap(), None).unwrap();
    let fnn = compute_metrics(&simulate(&scn).unwrap(), None).unwrap();
    let ratio = fnn.laps[1].lateral_mse / pd.laps[1].lateral_mse;
    assert!(ratio <= 0.8, "lap 2 lateral ratio {ratio}");
}

#[test]
fn far_start_diverges() {
    let mut scn = Scenario {
        trajectory: Trajectory::FigureEight {
            ax: 0.5,
            ay: 0.5,
            period: 20.0,
        },
        duration: 20.0,
        ..Default::default()
    };
    scn.initial.left = 30.0;
    assert!(matches!(simulate(&scn), Err(Error::SimDiverged { .. })));
}

proptest! {
    #[test]
    fn figure_eight_velocity_is_the_time_derivative(t in 0.0..240.0f64, ax in 1.0..30.0f64, ay in 1.0..30.0f64, period in 20.0..200.0f64) {
        let h = 1e-5;
        let (a, b) = (figure_eight(t - h, ax, ay, period), figure_eight(t + h, ax, ay, period));
        let r = figure_eight(t, ax, ay, period);
        prop_assert!((r.x_dot - (b.x - a.x) / (2.0 * h)).abs() < 1e-6);
        prop_assert!((r.y_dot - (b.y - a.y) / (2.0 * h)).abs() < 1e-6);
    }
}
