#![allow(dead_code)]

use fracmax::{MetricMeasureSpace, MetricSpec, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random coordinate space: dimension 1 to 3, Euclidean or Chebyshev,
/// weights in [0.5, 2]. Half the spaces sit on a coarse lattice so that
/// distances tie.
pub fn random_space(seed: u64, n: usize) -> MetricMeasureSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.gen_range(1..=3);
    let lattice = rng.gen_bool(0.5);
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    if lattice {
                        (v * 8.0).round() / 8.0
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let metric = if rng.gen_bool(0.5) { MetricSpec::euclidean(dim) } else { MetricSpec::chebyshev(dim) };
    let weights = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let cap = rng.gen_range(0.5..4.0);
    MetricMeasureSpace::from_coords(coords, metric, weights, cap).unwrap()
}

pub fn random_field(seed: u64, n: usize) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    ScalarField::new((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300) || a == b
}
