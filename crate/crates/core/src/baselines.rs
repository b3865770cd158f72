//! Classical baselines: k-means++ with Lloyd iterations, PAM k-medoids, and
//! the efficiency objectives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{validate_clustering, Cluster, Clustering, Instance};
use crate::util::by_dist_then_index;

pub const LLOYD_TOLERANCE: f64 = 1e-6;
pub const LLOYD_MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub clustering: Clustering,
    /// Final centroids in coordinate space, one per nonempty cluster.
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances after each assignment step.
    pub trace: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(c, mu)| (sq_dist(point, mu), c))
        .min_by(by_dist_then_index)
        .map(|(d, c)| (c, d))
        .expect("at least one centroid")
}

/// k-means++ seeding followed by Lloyd iterations on the agents'
/// coordinates; each final cluster is centered at the feasible center
/// nearest to its centroid.
pub fn kmeans_pp(inst: &Instance, seed: u64) -> Result<KMeansResult> {
    let coords = inst.coordinates().ok_or(Error::NoCoordinates)?;
    let n = inst.n();
    let k = inst.k().min(n);
    let points = &coords[..n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut closest: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in closest.iter().enumerate() {
                if u < w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centroids.push(points[pick].clone());
        for (c, p) in closest.iter_mut().zip(points) {
            *c = c.min(sq_dist(p, centroids.last().unwrap()));
        }
    }

    let dim = points[0].len();
    let mut assign = vec![0; n];
    let mut trace = Vec::new();
    for _ in 0..LLOYD_MAX_ITERATIONS {
        let mut cost = 0.0;
        for (a, p) in assign.iter_mut().zip(points) {
            let (c, d) = nearest(p, &centroids);
            *a = c;
            cost += d;
        }
        trace.push(cost);
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&a, p) in assign.iter().zip(points) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut shift = 0.0f64;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let mean: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            shift = shift.max(sq_dist(&mean, &centroids[c]).sqrt());
            centroids[c] = mean;
        }
        if shift <= LLOYD_TOLERANCE {
            break;
        }
    }
    // final assignment against the converged centroids
    for (a, p) in assign.iter_mut().zip(points) {
        *a = nearest(p, &centroids).0;
    }

    let center_points = inst.center_points();
    let mut clusters = Vec::new();
    let mut kept = Vec::new();
    for (c, mu) in centroids.into_iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&i| assign[i] == c).collect();
        if members.is_empty() {
            continue;
        }
        let center = (0..inst.m())
            .map(|x| (sq_dist(&coords[center_points[x]], &mu), x))
            .min_by(by_dist_then_index)
            .map(|(_, x)| x)
            .expect("instances have centers");
        clusters.push(Cluster { members, center });
        kept.push(mu);
    }
    Ok(KMeansResult {
        clustering: Clustering::new(clusters),
        centroids: kept,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoidsResult {
    pub clustering: Clustering,
    /// Center indices of the medoids, ascending.
    pub medoids: Vec<usize>,
    /// Total distance after BUILD and after every accepted swap.
    pub trace: Vec<f64>,
}

/// PAM: greedy BUILD, then best-improvement SWAP until no swap lowers the
/// sum of centroid distances. Medoids are drawn from the feasible centers.
pub fn k_medoids(inst: &Instance) -> KMedoidsResult {
    let n = inst.n();
    let m = inst.m();
    let k = inst.k().min(m);
    let d = |i: usize, x: usize| inst.center_dist(i, x);
    let cost_of = |medoids: &[usize]| -> f64 {
        (0..n)
            .map(|i| {
                medoids
                    .iter()
                    .map(|&x| d(i, x))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    };

    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut nearest_d = vec![f64::INFINITY; n];
    while medoids.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for x in (0..m).filter(|x| !medoids.contains(x)) {
            let total: f64 = (0..n).map(|i| nearest_d[i].min(d(i, x))).sum();
            if best.is_none_or(|(b, _)| total < b) {
                best = Some((total, x));
            }
        }
        let (_, x) = best.expect("k ≤ m leaves a candidate");
        medoids.push(x);
        for (i, nd) in nearest_d.iter_mut().enumerate() {
            *nd = nd.min(d(i, x));
        }
    }

    let mut cost = cost_of(&medoids);
    let mut trace = vec![cost];
    let tol = 1e-12 * cost.max(1.0);
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for slot in 0..medoids.len() {
            for x in (0..m).filter(|x| !medoids.contains(x)) {
                let mut trial = medoids.clone();
                trial[slot] = x;
                let c = cost_of(&trial);
                if c < cost - tol && best.is_none_or(|(b, _, _)| c < b) {
                    best = Some((c, slot, x));
                }
            }
        }
        let Some((c, slot, x)) = best else { break };
        medoids[slot] = x;
        cost = c;
        trace.push(cost);
    }

    medoids.sort_unstable();
    let mut groups = vec![Vec::new(); medoids.len()];
    for i in 0..n {
        let g = medoids
            .iter()
            .enumerate()
            .map(|(g, &x)| (d(i, x), g))
            .min_by(by_dist_then_index)
            .map(|(_, g)| g)
            .expect("at least one medoid");
        groups[g].push(i);
    }
    let clusters = groups
        .into_iter()
        .zip(&medoids)
        .filter(|(g, _)| !g.is_empty())
        .map(|(members, &center)| Cluster { members, center })
        .collect();
    KMedoidsResult {
        clustering: Clustering::new(clusters),
        medoids,
        trace,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveReport {
    /// `Σ_i d(i, x_{X(i)})²`.
    pub kmeans_obj: f64,
    /// `Σ_i d(i, x_{X(i)})`.
    pub kmedoids_obj: f64,
    /// `Σ_t (1/|C_t|) Σ_{i, j ∈ C_t} d(i, j)` over ordered pairs.
    pub avg_within: f64,
}

/// Efficiency objectives; center terms use the centroid metric and pair
/// terms the non-centroid metric.
pub fn objectives(inst: &Instance, x: &Clustering) -> Result<ObjectiveReport> {
    validate_clustering(inst, x)?;
    let mut r = ObjectiveReport {
        kmeans_obj: 0.0,
        kmedoids_obj: 0.0,
        avg_within: 0.0,
    };
    for c in &x.clusters {
        let mut within = 0.0;
        for &i in &c.members {
            let dist = inst.center_dist(i, c.center);
            r.kmeans_obj += dist * dist;
            r.kmedoids_obj += dist;
            within += c
                .members
                .iter()
                .map(|&j| inst.agent_dist(i, j))
                .sum::<f64>();
        }
        r.avg_within += within / c.members.len() as f64;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::{build_instance, CounterexampleSpec};
    use crate::metric::DistanceMatrix;
    use crate::random::{blobs, random_weighted};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn kmeans_with_k_equal_n_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let inst = random_weighted(&mut rng, 7, 7, 0.5);
        let r = kmeans_pp(&inst, 1).unwrap();
        assert_eq!(r.clustering.len(), 7);
        assert_eq!(objectives(&inst, &r.clustering).unwrap().kmeans_obj, 0.0);
    }

    #[test]
    fn kmeans_needs_coordinates() {
        let inst = Instance::weighted_agents_as_centers(DistanceMatrix::zeros(3), 1, 0.5).unwrap();
        assert_eq!(kmeans_pp(&inst, 0), Err(Error::NoCoordinates));
    }

    #[test]
    fn kmeans_recovers_two_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let inst = blobs(
            &mut rng,
            &[vec![0.0, 0.0], vec![50.0, 50.0]],
            10,
            1.0,
            2,
            0.5,
        );
        let r = kmeans_pp(&inst, 3).unwrap();
        assert_eq!(
            r.clustering.canonical_partition(),
            vec![(0..10).collect::<Vec<_>>(), (10..20).collect()]
        );
    }

    #[test]
    fn kmedoids_zero_objective_when_every_agent_is_a_medoid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let inst = random_weighted(&mut rng, 6, 6, 0.5);
        let r = k_medoids(&inst);
        assert_eq!(objectives(&inst, &r.clustering).unwrap().kmedoids_obj, 0.0);
    }

    #[test]
    fn kmedoids_two_triangles_never_crosses_big_edge() {
        let inst = build_instance(&CounterexampleSpec::fig1(10.0)).unwrap();
        let r = k_medoids(&inst);
        for c in &r.clustering.clusters {
            for &i in &c.members {
                assert!(inst.center_dist(i, c.center) < 1e6);
            }
        }
    }

    #[test]
    fn objectives_on_one_pair() {
        let d = DistanceMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let inst = Instance::weighted_agents_as_centers(d, 1, 0.5).unwrap();
        let x = Clustering::from_pairs([(vec![0, 1], 0)]);
        let r = objectives(&inst, &x).unwrap();
        assert_eq!(
            (r.kmeans_obj, r.kmedoids_obj, r.avg_within),
            (4.0, 2.0, 2.0)
        );

        let singles = Clustering::from_pairs([(vec![0], 0), (vec![1], 1)]);
        let inst2 = inst.with_k(2).unwrap();
        let r = objectives(&inst2, &singles).unwrap();
        assert_eq!(
            (r.kmeans_obj, r.kmedoids_obj, r.avg_within),
            (0.0, 0.0, 0.0)
        );
    }

    proptest! {
        #[test]
        fn lloyd_trace_nonincreasing(seed in 0u64..200, n in 2usize..30, k in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_weighted(&mut rng, n, k, 0.5);
            let r = kmeans_pp(&inst, seed).unwrap();
            for w in r.trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0));
            }
            validate_clustering(&inst, &r.clustering).unwrap();
        }

        #[test]
        fn swap_trace_decreasing(seed in 0u64..200, n in 2usize..16, k in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_weighted(&mut rng, n, k, 0.5);
            let r = k_medoids(&inst);
            for w in r.trace.windows(2) {
                prop_assert!(w[1] < w[0]);
            }
            let obj = objectives(&inst, &r.clustering).unwrap().kmedoids_obj;
            assert_relative_eq!(obj, *r.trace.last().unwrap(), max_relative = 1e-12);
        }

        #[test]
        fn objectives_scale(seed in 0u64..100, s in 0.1f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_weighted(&mut rng, 8, 3, 0.5);
            let x = k_medoids(&inst).clustering;
            let scaled = Instance::weighted_agents_as_centers(inst.single_metric().unwrap().scaled(s), 3, 0.5).unwrap();
            let (a, b) = (objectives(&inst, &x).unwrap(), objectives(&scaled, &x).unwrap());
            prop_assert!((a.kmeans_obj * s * s - b.kmeans_obj).abs() <= 1e-9 * b.kmeans_obj.max(1.0));
            prop_assert!((a.kmedoids_obj * s - b.kmedoids_obj).abs() <= 1e-9 * b.kmedoids_obj.max(1.0));
            prop_assert!((a.avg_within * s - b.avg_within).abs() <= 1e-9 * b.avg_within.max(1.0));
        }
    }
}
