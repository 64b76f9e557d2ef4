#![allow(dead_code)]

use nalgebra::DMatrix;
use nilforms::exterior::InnerProduct;
use nilforms::nilalgebra::{MetricLieAlgebra, StructureConstant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded 2-step algebra of dimension at most 6 with a random metric.
pub fn random_algebra(seed: u64, central: Option<usize>) -> MetricLieAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_v = central.unwrap_or_else(|| rng.random_range(1..=2));
    let n_h = rng.random_range(2..=6 - n_v);
    let mut constants = Vec::new();
    for i in 0..n_h {
        for j in (i + 1)..n_h {
            for k in 0..n_v {
                if rng.random_bool(0.7) {
                    constants.push(StructureConstant::new(i, j, k, rng.random_range(-2.0..2.0)));
                }
            }
        }
    }
    let m = n_h + n_v;
    let metric = if rng.random_bool(0.3) {
        None
    } else {
        let a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-0.5..0.5));
        Some(InnerProduct::new(a.transpose() * &a + DMatrix::identity(m, m) * 0.5).unwrap())
    };
    MetricLieAlgebra::new(n_h, n_v, &constants, metric).unwrap()
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}
