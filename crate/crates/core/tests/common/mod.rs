#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tractor_t2fnn::fuzzy::{T2FnnState, Type2TriangularMf};

/// Random 3x3 network with overlapping supports around the origin.
pub fn random_network(rng: &mut ChaCha8Rng) -> T2FnnState {
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

/// Input drawn inside the joint support of the network.
pub fn random_input(rng: &mut ChaCha8Rng) -> (f64, f64) {
    (rng.random_range(-1.2..1.2), rng.random_range(-2.4..2.4))
}
