use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tractor_t2fnn::control::ControllerMode;
use tractor_t2fnn::sim::{check_invariants, compute_metrics, run_scenario, Scenario, SimTrace};
use tractor_t2fnn::Error;

const EXIT_BAD_ARGS: u8 = 1;
const EXIT_DIVERGED: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

/// Tractor trajectory-tracking simulator.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a scenario and write its telemetry CSV.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// `pd` or `pd-t2fnn`
        #[arg(long)]
        mode: ControllerMode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare two telemetry files; `b` is the baseline.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Run a scenario and check the safety invariants at every step.
    CheckInvariants {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::SimDiverged { .. } => ExitCode::from(EXIT_DIVERGED),
        _ => ExitCode::from(EXIT_BAD_ARGS),
    }
}

fn print_lap_table(label: &str, m: &tractor_t2fnn::sim::Metrics) {
    println!(
        "{label}: lateral_mse={:.6} longitudinal_mse={:.6} yaw_rate_mse={:.6}",
        m.lateral_mse, m.longitudinal_mse, m.yaw_rate_mse
    );
    for (i, lap) in m.laps.iter().enumerate() {
        println!(
            "  lap {}: lateral_mse={:.6} longitudinal_mse={:.6} yaw_rate_mse={:.6}",
            i + 1,
            lap.lateral_mse,
            lap.longitudinal_mse,
            lap.yaw_rate_mse
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_BAD_ARGS)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match cli.cmd {
        Cmd::Run {
            scenario,
            mode,
            out,
            seed,
        } => {
            let mut scn = match Scenario::load(&scenario) {
                Ok(s) => s.with_mode(mode),
                Err(e) => return fail(e),
            };
            if let Some(seed) = seed {
                scn = scn.with_seed(seed);
            }
            let (trace, metrics) = match run_scenario(&scn) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            if let Err(e) = trace.save(&out) {
                return fail(e);
            }
            print_lap_table(&mode.to_string(), &metrics);
            ExitCode::SUCCESS
        }
        Cmd::Compare { a, b } => {
            let loaded = SimTrace::load(&a).and_then(|ta| Ok((ta, SimTrace::load(&b)?)));
            let (ta, tb) = match loaded {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            let m = match compute_metrics(&ta, Some(&tb)) {
                Ok(m) => m,
                Err(e) => return fail(e),
            };
            let base = match compute_metrics(&tb, None) {
                Ok(m) => m,
                Err(e) => return fail(e),
            };
            print_lap_table(&format!("a ({})", ta.meta.mode), &m);
            print_lap_table(&format!("b ({})", tb.meta.mode), &base);
            let ratio = m.improvement_ratio.unwrap_or(f64::NAN);
            println!("improvement ratio (lateral_mse a / b) = {ratio:.4}");
            println!("improvement = {:.1}%", 100.0 * (1.0 - ratio));
            ExitCode::SUCCESS
        }
        Cmd::CheckInvariants { scenario } => {
            let scn = match Scenario::load(&scenario) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match check_invariants(&scn) {
                Ok(report) => {
                    print!("{report}");
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_INVARIANT)
                    }
                }
                Err(e) => fail(e),
            }
        }
    }
}
