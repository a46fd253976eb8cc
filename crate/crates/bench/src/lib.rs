//! Input generators shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srank_core::{
    pairwise_dissimilarity, stable_rank, Bar, Barcode, Contour, DissimilarityMatrix, Metric,
    PointCloud, StableRank, Truncation,
};

/// `n` points uniform in the unit square.
pub fn uniform_cloud(n: usize, seed: u64) -> PointCloud {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    PointCloud::new((0..n).map(|_| vec![r.random(), r.random()]).collect()).unwrap()
}

/// Euclidean distances of a noisy unit circle with `n` points.
pub fn noisy_circle(n: usize, seed: u64) -> DissimilarityMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|_| {
            let a = r.random::<f64>() * std::f64::consts::TAU;
            vec![
                a.cos() + r.random_range(-0.1..0.1),
                a.sin() + r.random_range(-0.1..0.1),
            ]
        })
        .collect();
    pairwise_dissimilarity(&PointCloud::new(pts).unwrap(), Metric::Euclidean).unwrap()
}

/// A degree-0 barcode with `n` finite bars in `[0, 2)`.
pub fn random_barcode(n: usize, seed: u64) -> Barcode {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let bars = (0..n).map(|_| {
        let b = r.random_range(0.0..1.0);
        Bar::new(b, b + r.random_range(0.001..1.0), 0)
    });
    Barcode::new(bars, 2.0).unwrap()
}

pub fn random_rank(n: usize, seed: u64) -> StableRank {
    stable_rank(
        &random_barcode(n, seed),
        0,
        &Contour::Standard,
        Truncation::CapAtMaxScale,
    )
}
