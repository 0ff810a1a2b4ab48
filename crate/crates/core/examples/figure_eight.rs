//! Two laps of the figure-eight with the PD controller alone and with the
//! learning network in parallel, then the error comparison.
//!
//! ```text
//! cargo run --release --example figure_eight [scenario.json]
//! ```

use tractor_t2fnn::control::ControllerMode;
use tractor_t2fnn::sim::{compute_metrics, simulate, Scenario, SimTrace};

fn mean_abs(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x.abs(), n + 1));
    s / n.max(1) as f64
}

fn tail_share(trace: &SimTrace, f: impl Fn(&tractor_t2fnn::sim::TraceRow) -> f64) -> (f64, f64) {
    let n = trace.rows.len() / 10;
    let head = mean_abs(trace.rows[..n].iter().map(&f));
    let tail = mean_abs(trace.rows[trace.rows.len() - n..].iter().map(&f));
    (head, tail)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scn = match std::env::args().nth(1) {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };

    let started = std::time::Instant::now();
    let pd = simulate(&scn.clone().with_mode(ControllerMode::PdOnly))?;
    let fnn = simulate(&scn.clone().with_mode(ControllerMode::PdPlusT2fnn))?;
    let elapsed = started.elapsed();

    let m_pd = compute_metrics(&pd, None)?;
    let m_fnn = compute_metrics(&fnn, Some(&pd))?;
    for (name, m) in [("pd", &m_pd), ("pd-t2fnn", &m_fnn)] {
        println!(
            "{name:9} lateral {:.5}  longitudinal {:.5}  yaw-rate {:.6}",
            m.lateral_mse, m.longitudinal_mse, m.yaw_rate_mse
        );
        for (i, lap) in m.laps.iter().enumerate() {
            println!(
                "          lap {}: lateral {:.5}  yaw-rate {:.6}",
                i + 1,
                lap.lateral_mse,
                lap.yaw_rate_mse
            );
        }
    }
    let ratio = m_fnn.improvement_ratio.unwrap_or(f64::NAN);
    println!("lateral ratio pd-t2fnn / pd = {ratio:.3}");

    let (head, tail) = tail_share(&fnn, |r| r.tau);
    let (_, cmd_tail) = tail_share(&fnn, |r| r.steer_cmd);
    println!(
        "mean |tau| first 10% {head:.5}, last 10% {tail:.5} (ratio {:.3}); mean |command| last 10% {cmd_tail:.5}",
        tail / head
    );
    let q_end = fnn.rows.last().map_or(f64::NAN, |r| r.q);
    println!("final q = {q_end:.4}; both runs took {elapsed:.2?}");
    Ok(())
}
