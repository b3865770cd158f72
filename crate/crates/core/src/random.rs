//! Seeded random instance generators for tests and experiments.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::instance::{Cluster, Clustering, Instance};
use crate::metric::DistanceMatrix;

const SIDE: f64 = 100.0;

fn uniform_points(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| vec![rng.random_range(0.0..SIDE), rng.random_range(0.0..SIDE)])
        .collect()
}

/// Uniform points in a square; every agent is a feasible center and the
/// coordinates are attached.
pub fn random_weighted(rng: &mut impl Rng, n: usize, k: usize, lambda: f64) -> Instance {
    let pts = uniform_points(rng, n);
    Instance::weighted_agents_as_centers(DistanceMatrix::euclidean(&pts), k, lambda)
        .and_then(|i| i.with_coordinates(pts))
        .expect("euclidean instances are valid")
}

/// Shortest-path closure of a random connected graph with small integer
/// weights, so distance ties are common.
pub fn random_integer_metric(rng: &mut impl Rng, n: usize, k: usize, lambda: f64) -> Instance {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let link = |d: &mut Vec<Vec<f64>>, i: usize, j: usize, w: f64| {
        d[i][j] = d[i][j].min(w);
        d[j][i] = d[i][j];
    };
    for i in 1..n {
        let j = rng.random_range(0..i);
        let w = rng.random_range(1..=4) as f64;
        link(&mut d, i, j, w);
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.3) {
                let w = rng.random_range(1..=4) as f64;
                link(&mut d, i, j, w);
            }
        }
    }
    for via in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = d[i][via] + d[via][j];
                if through < d[i][j] {
                    d[i][j] = through;
                }
            }
        }
    }
    let d = DistanceMatrix::from_rows(&d).expect("square");
    Instance::weighted_agents_as_centers(d, k, lambda).expect("closure is a metric")
}

/// Two independent planar embeddings of the same agents, one per metric;
/// every agent is a feasible center.
pub fn random_dual(rng: &mut impl Rng, n: usize, k: usize) -> Instance {
    let dm = DistanceMatrix::euclidean(&uniform_points(rng, n));
    let dc = DistanceMatrix::euclidean(&uniform_points(rng, n));
    Instance::dual(dm, dc, (0..n).collect(), k).expect("euclidean instances are valid")
}

/// Gaussian clouds of `per_blob` points around each mean, in blob order.
pub fn blobs(
    rng: &mut impl Rng,
    means: &[Vec<f64>],
    per_blob: usize,
    sigma: f64,
    k: usize,
    lambda: f64,
) -> Instance {
    let noise = Normal::new(0.0, sigma).expect("sigma is finite and nonnegative");
    let pts: Vec<Vec<f64>> = means
        .iter()
        .flat_map(|mu| std::iter::repeat_n(mu, per_blob))
        .map(|mu| mu.iter().map(|&c| c + noise.sample(rng)).collect())
        .collect();
    Instance::weighted_agents_as_centers(DistanceMatrix::euclidean(&pts), k, lambda)
        .and_then(|i| i.with_coordinates(pts))
        .expect("euclidean instances are valid")
}

/// Uniform labels in `0..k` with uniform centers; empty labels are dropped.
pub fn random_clustering(rng: &mut impl Rng, inst: &Instance) -> Clustering {
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); inst.k()];
    for i in 0..inst.n() {
        groups[rng.random_range(0..inst.k())].push(i);
    }
    let clusters = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|members| Cluster {
            members,
            center: rng.random_range(0..inst.m()),
        })
        .collect();
    Clustering::new(clusters)
}
