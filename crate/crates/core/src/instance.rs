//! Instances, clusterings and deviations.
//!
//! Agents are the points `0..n` of the ambient distance space. Each feasible
//! center refers to a point of the space that carries the centroid distances,
//! so `M = N` is expressed by `centers = [0, 1, .., n-1]` and a separate
//! center set by extra points after the agents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{validate_pseudometric, DistanceMatrix};

/// Distance data for the two loss families.
#[derive(Debug, Clone, PartialEq)]
pub enum Metrics {
    /// One metric `d` over agents and center points, scaled by `lambda` for
    /// the non-centroid part and by `1 - lambda` for the centroid part.
    Weighted { d: DistanceMatrix, lambda: f64 },
    /// Independent metrics: `noncentroid` over agents, `centroid` over
    /// agents and center points.
    Dual {
        noncentroid: DistanceMatrix,
        centroid: DistanceMatrix,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    n: usize,
    k: usize,
    centers: Vec<usize>,
    metrics: Metrics,
    coordinates: Option<Vec<Vec<f64>>>,
}

impl Instance {
    /// Weighted single-metric instance. `d` covers the `n` agents followed by
    /// any dedicated center points.
    pub fn weighted(
        d: DistanceMatrix,
        n: usize,
        centers: Vec<usize>,
        k: usize,
        lambda: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        validate_pseudometric(&d)?;
        let inst = Self {
            n,
            k,
            centers,
            metrics: Metrics::Weighted { d, lambda },
            coordinates: None,
        };
        inst.check_shape()?;
        Ok(inst)
    }

    /// Weighted instance where every agent is also a feasible center.
    pub fn weighted_agents_as_centers(d: DistanceMatrix, k: usize, lambda: f64) -> Result<Self> {
        let n = d.size();
        Self::weighted(d, n, (0..n).collect(), k, lambda)
    }

    pub fn dual(
        noncentroid: DistanceMatrix,
        centroid: DistanceMatrix,
        centers: Vec<usize>,
        k: usize,
    ) -> Result<Self> {
        validate_pseudometric(&noncentroid)?;
        validate_pseudometric(&centroid)?;
        let inst = Self {
            n: noncentroid.size(),
            k,
            centers,
            metrics: Metrics::Dual {
                noncentroid,
                centroid,
            },
            coordinates: None,
        };
        inst.check_shape()?;
        Ok(inst)
    }

    /// Attaches per-point coordinates (agents first, then any center points).
    pub fn with_coordinates(mut self, coordinates: Vec<Vec<f64>>) -> Result<Self> {
        if coordinates.len() != self.space().size() {
            return Err(Error::InvalidInstance(format!(
                "{} coordinate rows for {} points",
                coordinates.len(),
                self.space().size()
            )));
        }
        self.coordinates = Some(coordinates);
        Ok(self)
    }

    /// Same distances with a different weight; only for weighted instances.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        match &self.metrics {
            Metrics::Weighted { d, .. } => Ok(Self {
                metrics: Metrics::Weighted {
                    d: d.clone(),
                    lambda,
                },
                ..self.clone()
            }),
            Metrics::Dual { .. } => Err(Error::RequiresWeighted),
        }
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        let inst = Self { k, ..self.clone() };
        inst.check_shape()?;
        Ok(inst)
    }

    /// Same instance with a different feasible center set.
    pub fn with_centers(&self, centers: Vec<usize>) -> Result<Self> {
        let inst = Self {
            centers,
            ..self.clone()
        };
        inst.check_shape()?;
        Ok(inst)
    }

    fn check_shape(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInstance("no agents".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidInstance("k must be positive".into()));
        }
        if self.centers.is_empty() {
            return Err(Error::InvalidInstance("no feasible centers".into()));
        }
        let space = self.space().size();
        if self.n > space {
            return Err(Error::InvalidInstance(format!(
                "{} agents but the metric covers {space} points",
                self.n
            )));
        }
        if let Metrics::Dual { noncentroid, .. } = &self.metrics {
            if noncentroid.size() != self.n {
                return Err(Error::InvalidInstance(
                    "non-centroid metric must cover exactly the agents".into(),
                ));
            }
        }
        if let Some(&bad) = self.centers.iter().find(|&&c| c >= space) {
            return Err(Error::InvalidInstance(format!(
                "center point {bad} outside the metric space"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of feasible centers, |M|.
    #[inline]
    pub fn m(&self) -> usize {
        self.centers.len()
    }

    /// Ambient point of each feasible center.
    pub fn center_points(&self) -> &[usize] {
        &self.centers
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn lambda(&self) -> Option<f64> {
        match self.metrics {
            Metrics::Weighted { lambda, .. } => Some(lambda),
            Metrics::Dual { .. } => None,
        }
    }

    pub fn coordinates(&self) -> Option<&[Vec<f64>]> {
        self.coordinates.as_deref()
    }

    /// Coalition threshold ⌈n/k⌉.
    pub fn threshold(&self) -> usize {
        self.n.div_ceil(self.k)
    }

    /// The metric that carries centroid distances (`d` or `d^c`), over all
    /// ambient points.
    pub fn space(&self) -> &DistanceMatrix {
        match &self.metrics {
            Metrics::Weighted { d, .. } => d,
            Metrics::Dual { centroid, .. } => centroid,
        }
    }

    /// Unscaled distance between agent `i` and feasible center `x`.
    #[inline]
    pub fn center_dist(&self, i: usize, x: usize) -> f64 {
        self.space().get(i, self.centers[x])
    }

    /// Unscaled non-centroid distance between agents.
    #[inline]
    pub fn agent_dist(&self, i: usize, j: usize) -> f64 {
        match &self.metrics {
            Metrics::Weighted { d, .. } => d.get(i, j),
            Metrics::Dual { noncentroid, .. } => noncentroid.get(i, j),
        }
    }

    /// The single metric of a weighted instance.
    pub fn single_metric(&self) -> Result<&DistanceMatrix> {
        match &self.metrics {
            Metrics::Weighted { d, .. } => Ok(d),
            Metrics::Dual { .. } => Err(Error::RequiresWeighted),
        }
    }

    /// Nearest feasible center to ambient point `p`, lowest index on ties.
    pub fn nearest_center_to_point(&self, p: usize) -> usize {
        let space = self.space();
        let mut best = 0;
        for x in 1..self.m() {
            if space.get(p, self.centers[x]) < space.get(p, self.centers[best]) {
                best = x;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub members: Vec<usize>,
    /// Index into the feasible center set.
    pub center: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub clusters: Vec<Cluster>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capture_radii: Option<Vec<f64>>,
}

impl Clustering {
    pub fn new(clusters: Vec<Cluster>) -> Self {
        Self {
            clusters,
            capture_radii: None,
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Vec<usize>, usize)>) -> Self {
        Self::new(
            pairs
                .into_iter()
                .map(|(members, center)| Cluster { members, center })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster index of every agent, `X(i)`. Assumes a valid clustering.
    pub fn assignment(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (t, c) in self.clusters.iter().enumerate() {
            for &i in &c.members {
                out[i] = t;
            }
        }
        out
    }

    /// Member sets sorted internally and across clusters; used to compare
    /// partitions irrespective of order and centers.
    pub fn canonical_partition(&self) -> Vec<Vec<usize>> {
        let mut parts: Vec<Vec<usize>> = self
            .clusters
            .iter()
            .map(|c| {
                let mut m = c.members.clone();
                m.sort_unstable();
                m
            })
            .collect();
        parts.sort();
        parts
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.members.len()).collect()
    }
}

/// A coalition `S` together with the center `y` it would deviate to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub members: Vec<usize>,
    pub center: usize,
}

/// Checks that `x` partitions the agents into at most `k` nonempty clusters
/// with feasible centers.
pub fn validate_clustering(inst: &Instance, x: &Clustering) -> Result<()> {
    if x.len() > inst.k() {
        return Err(Error::TooManyClusters {
            count: x.len(),
            k: inst.k(),
        });
    }
    let mut seen = vec![false; inst.n()];
    for (t, c) in x.clusters.iter().enumerate() {
        if c.members.is_empty() {
            return Err(Error::EmptyCluster { cluster: t });
        }
        if c.center >= inst.m() {
            return Err(Error::InfeasibleCenter {
                cluster: t,
                center: c.center,
            });
        }
        for &i in &c.members {
            if i >= inst.n() {
                return Err(Error::AgentOutOfRange { agent: i });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::OverlappingClusters { agent: i });
            }
        }
    }
    if let Some(agent) = seen.iter().position(|s| !s) {
        return Err(Error::UncoveredAgent { agent });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_points(k: usize) -> Instance {
        let d = DistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        Instance::weighted_agents_as_centers(d, k, 0.5).unwrap()
    }

    #[test]
    fn accepts_valid_partition() {
        let inst = three_points(2);
        let x = Clustering::from_pairs([(vec![0, 1], 0), (vec![2], 2)]);
        assert!(validate_clustering(&inst, &x).is_ok());
    }

    #[test]
    fn rejects_overlap_uncovered_and_too_many() {
        let inst = three_points(2);
        let overlap = Clustering::from_pairs([(vec![0, 1], 0), (vec![1, 2], 2)]);
        assert_eq!(
            validate_clustering(&inst, &overlap),
            Err(Error::OverlappingClusters { agent: 1 })
        );
        let uncovered = Clustering::from_pairs([(vec![0, 1], 0)]);
        assert_eq!(
            validate_clustering(&inst, &uncovered),
            Err(Error::UncoveredAgent { agent: 2 })
        );
        let inst1 = three_points(1);
        let two = Clustering::from_pairs([(vec![0, 1], 0), (vec![2], 2)]);
        assert_eq!(
            validate_clustering(&inst1, &two),
            Err(Error::TooManyClusters { count: 2, k: 1 })
        );
        let bad_center = Clustering::from_pairs([(vec![0, 1, 2], 7)]);
        assert!(matches!(
            validate_clustering(&inst, &bad_center),
            Err(Error::InfeasibleCenter { center: 7, .. })
        ));
    }

    #[test]
    fn threshold_is_ceiling() {
        assert_eq!(three_points(2).threshold(), 2);
        assert_eq!(three_points(3).threshold(), 1);
        assert_eq!(three_points(1).threshold(), 3);
    }

    #[test]
    fn rejects_bad_shapes() {
        let d = DistanceMatrix::zeros(3);
        assert!(Instance::weighted(d.clone(), 3, vec![], 1, 0.5).is_err());
        assert!(Instance::weighted(d.clone(), 3, vec![5], 1, 0.5).is_err());
        assert!(Instance::weighted(d.clone(), 3, vec![0], 0, 0.5).is_err());
        assert_eq!(
            Instance::weighted(d, 3, vec![0], 1, 1.5),
            Err(Error::LambdaOutOfRange(1.5))
        );
    }
}
