//! Shared fixtures for the benchmark suite: seeded random point sets and
//! query batches, so every run measures the same inputs.

use hdepth::PointSet;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible 2-D point set drawn uniformly from `[-10, 10]^2`.
pub fn random_set(n: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| vec![rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)])
        .collect();
    PointSet::new(2, rows).expect("random rows are valid")
}

/// Reproducible 2-D queries drawn a little wider than the point sets.
pub fn random_queries(k: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| {
            DVector::from_vec(vec![
                rng.random_range(-12.0..12.0),
                rng.random_range(-12.0..12.0),
            ])
        })
        .collect()
}
