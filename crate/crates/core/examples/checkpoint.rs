//! Trains the network for one lap, writes it as JSON, reloads it and checks
//! that the reloaded copy gives the same output.
//!
//! ```text
//! cargo run --release --example checkpoint [out.json]
//! ```

use tractor_t2fnn::control::ControllerMode;
use tractor_t2fnn::fuzzy::T2FnnState;
use tractor_t2fnn::sim::{Scenario, Simulation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "network.json".into());
    let scn = Scenario {
        duration: 120.0,
        ..Default::default()
    }
    .with_mode(ControllerMode::PdPlusT2fnn);
    let mut sim = Simulation::new(&scn)?;
    while sim.step()?.is_some() {}
    let net = sim.yaw_controller().network().ok_or("no network in learning mode")?.clone();
    net.save(&out)?;

    let back = T2FnnState::load(&out)?;
    let floor = scn.learning.denom_floor;
    for (e, ed) in [(0.0, 0.0), (0.05, -0.5), (-0.1, 2.0)] {
        println!(
            "tau_n({e:+.2}, {ed:+.2}) = {:+.6}  reloaded {:+.6}",
            net.output(e, ed, floor),
            back.output(e, ed, floor)
        );
    }
    println!("q = {:.4}, consequents = {:.4?}", back.q, back.consequents);
    println!("wrote {out}");
    Ok(())
}
