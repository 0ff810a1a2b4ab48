//! Frozen-input probe of the learning laws: one update with `τ` and the
//! network inputs held, counting how often `Vc = τc²/2` grows. The count is
//! binned by `|τc|` and repeated for shorter steps.
//!
//! ```text
//! cargo run --release --example lyapunov_probe [alpha]
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tractor_t2fnn::fuzzy::{T2FnnState, Type2TriangularMf};
use tractor_t2fnn::learning::{learn_step, LearnConfig, NetworkInputs};

fn random_network(rng: &mut ChaCha8Rng) -> T2FnnState {
    let mut axis = |range: f64| -> Vec<Type2TriangularMf> {
        (0..3)
            .map(|k| {
                let center = (k as f64 - 1.0) * range + rng.random_range(-0.2..0.2) * range;
                let lower = rng.random_range(0.8..1.6) * range;
                let upper = lower * rng.random_range(1.0..2.0);
                Type2TriangularMf::new(center, lower, upper).unwrap()
            })
            .collect()
    };
    let mfs_x1 = axis(1.0);
    let mfs_x2 = axis(2.0);
    T2FnnState {
        mfs_x1,
        mfs_x2,
        consequents: (0..9).map(|_| rng.random_range(-1.0..1.0)).collect(),
        q: rng.random_range(0.05..0.95),
    }
}

const EDGES: [f64; 6] = [0.05, 0.1, 0.2, 0.4, 0.8, f64::INFINITY];

fn main() {
    let alpha: f64 = std::env::args().nth(1).map_or(5.0, |a| a.parse().expect("alpha"));
    let cfg = LearnConfig {
        alpha,
        ..Default::default()
    };
    println!("alpha = {alpha}, delta_s = {}", cfg.delta_s);
    for dt in [0.05, 0.01, 0.001, 1e-4] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut probes = [0usize; EDGES.len()];
        let mut grew = [0usize; EDGES.len()];
        let mut worst = 0.0f64;
        let mut n = 0;
        while n < 10_000 {
            let mut net = random_network(&mut rng);
            let input = NetworkInputs {
                x1: rng.random_range(-1.2..1.2),
                x2: rng.random_range(-2.4..2.4),
                ..Default::default()
            };
            let tau = rng.random_range(-1.0..1.0);
            if net.fire(input.x1, input.x2, cfg.denom_floor).sum_lower <= cfg.denom_floor {
                continue;
            }
            let before = learn_step(&mut net, input, tau, &cfg, dt).tau_c;
            if before.abs() <= cfg.delta_s {
                continue;
            }
            n += 1;
            let after = net.output(input.x1, input.x2, cfg.denom_floor) + tau;
            let bin = EDGES.iter().position(|&e| before.abs() <= e).unwrap();
            probes[bin] += 1;
            let dv = 0.5 * (after * after - before * before);
            if dv > 0.0 {
                grew[bin] += 1;
                worst = worst.max(dv);
            }
        }
        let total: usize = grew.iter().sum();
        println!("dt = {dt:<7} Vc grew in {total:5} / 10000 probes, worst +{worst:.4}");
        let mut lo = cfg.delta_s;
        for (i, hi) in EDGES.iter().enumerate().skip(1) {
            if probes[i] > 0 {
                println!("    |tau_c| in ({lo:.2}, {hi:.2}]: {:5} / {:5}", grew[i], probes[i]);
            }
            lo = *hi;
        }
    }
}
