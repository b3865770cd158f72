//! Per-agent losses for the dual-metric and weighted single-metric families.
//!
//! Every loss is `max_{j in C} nc(i, j) + c(i, x)`. The model materialises
//! the two component tables once so that all consumers (algorithms, brute
//! force and clique audits) evaluate bit-identical floating point values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{validate_clustering, Clustering, Instance, Metrics};

/// Which loss an evaluator computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossTarget {
    Dual,
    Weighted,
    CentroidOnly,
    NoncentroidOnly,
}

impl std::fmt::Display for LossTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossTarget::Dual => "dual",
            LossTarget::Weighted => "weighted",
            LossTarget::CentroidOnly => "centroid-only",
            LossTarget::NoncentroidOnly => "noncentroid-only",
        })
    }
}

#[derive(Debug, Clone)]
pub struct LossModel {
    target: LossTarget,
    n: usize,
    m: usize,
    noncentroid: Vec<f64>,
    centroid: Vec<f64>,
}

impl LossModel {
    /// The instance's own loss: dual for dual instances, weighted with the
    /// stored lambda otherwise.
    pub fn native(inst: &Instance) -> Self {
        match inst.metrics() {
            Metrics::Weighted { lambda, .. } => Self::weighted_scaled(inst, *lambda),
            Metrics::Dual { .. } => Self::build(inst, LossTarget::Dual, 1.0, 1.0),
        }
    }

    /// Weighted loss with an explicit lambda over a weighted instance's metric.
    pub fn weighted(inst: &Instance, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        inst.single_metric()?;
        Ok(Self::weighted_scaled(inst, lambda))
    }

    fn weighted_scaled(inst: &Instance, lambda: f64) -> Self {
        Self::build(inst, LossTarget::Weighted, lambda, 1.0 - lambda)
    }

    /// Pure centroid loss `d(i, x)` (or `d^c`).
    pub fn centroid_only(inst: &Instance) -> Self {
        Self::build(inst, LossTarget::CentroidOnly, 0.0, 1.0)
    }

    /// Pure non-centroid loss `max_j d(i, j)` (or `d^m`).
    pub fn noncentroid_only(inst: &Instance) -> Self {
        Self::build(inst, LossTarget::NoncentroidOnly, 1.0, 0.0)
    }

    pub fn for_target(inst: &Instance, target: LossTarget) -> Result<Self> {
        match target {
            LossTarget::CentroidOnly => Ok(Self::centroid_only(inst)),
            LossTarget::NoncentroidOnly => Ok(Self::noncentroid_only(inst)),
            LossTarget::Weighted => {
                Self::weighted(inst, inst.lambda().ok_or(Error::RequiresWeighted)?)
            }
            LossTarget::Dual => Ok(Self::build(inst, LossTarget::Dual, 1.0, 1.0)),
        }
    }

    fn build(inst: &Instance, target: LossTarget, nc_weight: f64, c_weight: f64) -> Self {
        let (n, m) = (inst.n(), inst.m());
        let mut noncentroid = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                noncentroid.push(nc_weight * inst.agent_dist(i, j));
            }
        }
        let mut centroid = Vec::with_capacity(n * m);
        for i in 0..n {
            for x in 0..m {
                centroid.push(c_weight * inst.center_dist(i, x));
            }
        }
        Self {
            target,
            n,
            m,
            noncentroid,
            centroid,
        }
    }

    pub fn target(&self) -> LossTarget {
        self.target
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Scaled non-centroid distance between agents (`d^m` or `λ·d`).
    #[inline]
    pub fn nc(&self, i: usize, j: usize) -> f64 {
        self.noncentroid[i * self.n + j]
    }

    /// Scaled centroid distance from agent to center (`d^c` or `(1-λ)·d`).
    #[inline]
    pub fn c(&self, i: usize, x: usize) -> f64 {
        self.centroid[i * self.m + x]
    }

    /// Non-centroid component `ℓ^m_i(C)`.
    #[inline]
    pub fn noncentroid_part(&self, i: usize, members: &[usize]) -> f64 {
        members.iter().map(|&j| self.nc(i, j)).fold(0.0, f64::max)
    }

    /// Loss of `i` in `(C, x)` without membership checks.
    #[inline]
    pub fn loss_unchecked(&self, i: usize, members: &[usize], x: usize) -> f64 {
        self.noncentroid_part(i, members) + self.c(i, x)
    }

    pub fn loss(&self, i: usize, members: &[usize], x: usize) -> Result<f64> {
        if !members.contains(&i) {
            return Err(Error::AgentNotInCluster { agent: i });
        }
        Ok(self.loss_unchecked(i, members, x))
    }

    /// Largest member loss of `(C, x)`.
    pub fn max_loss(&self, members: &[usize], x: usize) -> f64 {
        members
            .iter()
            .map(|&i| self.loss_unchecked(i, members, x))
            .fold(0.0, f64::max)
    }

    /// `ℓ_i(X)` for every agent, after validating the clustering.
    pub fn clustering_losses(&self, inst: &Instance, x: &Clustering) -> Result<Vec<f64>> {
        validate_clustering(inst, x)?;
        Ok(self.losses_unchecked(x))
    }

    pub fn losses_unchecked(&self, x: &Clustering) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for c in &x.clusters {
            for &i in &c.members {
                out[i] = self.loss_unchecked(i, &c.members, c.center);
            }
        }
        out
    }
}
