//! Inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ripsapprox::PointCloud;

/// `n` uniform points in the unit cube of dimension `d`.
pub fn uniform_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
        .collect();
    PointCloud::new(points).expect("random points are distinct")
}
