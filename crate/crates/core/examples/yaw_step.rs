//! Step steering input on the linear-tire plant at a few speeds: the
//! settled lateral speed and yaw rate against the linear steady state, and
//! the 90% rise time of the yaw rate.
//!
//! ```text
//! cargo run --example yaw_step
//! ```

use tractor_t2fnn::vehicle::{plant_step, yaw_dynamics_matrices, RigidBodyState, TractorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = TractorParams {
        longitudinal_drag: 0.0,
        ..Default::default()
    };
    let delta = 0.1;
    let dt = 0.05;
    for u in [0.5, 1.5, 3.0, 5.0] {
        let ss = yaw_dynamics_matrices(&params, u)?
            .steady_state(delta)
            .ok_or("singular yaw matrix")?;
        let eig = yaw_dynamics_matrices(&params, u)?.a.complex_eigenvalues();
        let mut s = RigidBodyState {
            u,
            delta,
            ..Default::default()
        };
        let mut rise = None;
        for k in 1..=200 {
            s = plant_step(&s, delta, 0.0, &params, dt)?;
            if rise.is_none() && s.gamma >= 0.9 * ss[1] {
                rise = Some(k as f64 * dt);
            }
        }
        println!(
            "u {u:.1} m/s: v {:+.5} (ss {:+.5})  gamma {:+.5} (ss {:+.5})  rise {:.2} s  eig {:.2}, {:.2}",
            s.v,
            ss[0],
            s.gamma,
            ss[1],
            rise.unwrap_or(f64::NAN),
            eig[0].re,
            eig[1].re
        );
    }
    Ok(())
}
