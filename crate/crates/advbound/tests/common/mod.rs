//! Shared fixtures for the integration suites: fixed-seed dataset
//! generators and brute-force reference computations.

#![allow(dead_code)] // each test target uses a different subset

use advbound::{LabeledDataset, LossSpec, Metric};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

/// Three Gaussian blobs in the plane: 20 points per class around
/// (-2, 2), (2, 2), (-2, -2), unit covariance, uniform weights.
pub fn synthetic_three_class() -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let means = [(-2.0, 2.0), (2.0, 2.0), (-2.0, -2.0)];
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (class, &(mx, my)) in means.iter().enumerate() {
        for _ in 0..20 {
            points.push(vec![
                mx + noise.sample(&mut rng),
                my + noise.sample(&mut rng),
            ]);
            labels.push(class as u64);
        }
    }
    LabeledDataset::new(points, labels, None).unwrap()
}

/// Image-like fixture: 4 classes, 50 vectors each in R^784, every
/// coordinate quantized to the 1/8 grid. Class c draws coordinates from
/// {c/8, ..., (c+4)/8}, so the class ranges overlap and the cross-class
/// Chebyshev distances concentrate on a few exact multiples of 1/8 —
/// which is what produces clean staircase breakpoints.
pub fn mnist_style() -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for class in 0..4u64 {
        for _ in 0..50 {
            let point: Vec<f64> = (0..784)
                .map(|_| (class + rng.gen_range(0..=4)) as f64 / 8.0)
                .collect();
            points.push(point);
            labels.push(class);
        }
    }
    LabeledDataset::new(points, labels, None).unwrap()
}

/// Small random dataset: 2 or 3 classes, 1-5 points per class, planar
/// coordinates in [-2, 2].
pub fn random_micro(rng: &mut ChaCha8Rng) -> LabeledDataset {
    let k = rng.gen_range(2..=3u64);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for class in 0..k {
        for _ in 0..rng.gen_range(1..=5) {
            points.push(vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
            labels.push(class);
        }
    }
    LabeledDataset::new(points, labels, None).unwrap()
}

/// Two-class dataset with at most four points in total (small enough for
/// the exhaustive grid oracle).
pub fn random_two_class_tiny(rng: &mut ChaCha8Rng) -> LabeledDataset {
    let n0 = rng.gen_range(1..=3usize);
    let n1 = rng.gen_range(1..=(4 - n0));
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (class, count) in [(0u64, n0), (1, n1)] {
        for _ in 0..count {
            points.push(vec![rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)]);
            labels.push(class);
        }
    }
    LabeledDataset::new(points, labels, None).unwrap()
}

/// Random query points, each within `0.9 * epsilon` of some support atom
/// (in the given metric), so every query is reachable from at least one
/// class.
pub fn in_reach_queries(
    data: &LabeledDataset,
    metric: Metric,
    epsilon: f64,
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Vec<Vec<f64>> {
    let dim = data.dim();
    (0..count)
        .map(|_| {
            let atom = data.point(rng.gen_range(0..data.len()));
            let scale = epsilon * rng.gen_range(0.0..0.9);
            let mut query = atom.to_vec();
            match metric {
                Metric::Euclidean => {
                    let dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
                    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                    for (q, d) in query.iter_mut().zip(&dir) {
                        *q += scale * d / norm;
                    }
                }
                Metric::Chebyshev => {
                    for q in query.iter_mut() {
                        *q += rng.gen_range(-1.0..1.0) * scale;
                    }
                }
            }
            query
        })
        .collect()
}

/// Brute-force reference for the 3-class quadratic minimax: evaluate
/// max_i (quadratic loss - t_i) on every simplex grid point with the
/// given resolution and return the smallest value found.
pub fn quadratic_grid_minimax(transforms: &[f64; 3], steps: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=(steps - i) {
            let v = [
                i as f64 / steps as f64,
                j as f64 / steps as f64,
                (steps - i - j) as f64 / steps as f64,
            ];
            let worst = (0..3)
                .map(|c| advbound::loss_value(&LossSpec::Quadratic, &v, c) - transforms[c])
                .fold(f64::NEG_INFINITY, f64::max);
            best = best.min(worst);
        }
    }
    best
}

/// All distinct cross-class pairwise distances of a dataset under the
/// given metric, sorted ascending, deduplicated at 1e-12 resolution.
pub fn cross_class_distances(data: &LabeledDataset, metric: Metric) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..data.len() {
        for j in (i + 1)..data.len() {
            if data.label(i) != data.label(j) {
                out.push(metric.distance(data.point(i), data.point(j)));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    out
}
