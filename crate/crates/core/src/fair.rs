//! Core- and FJR-approximate clustering algorithms built on most cohesive
//! clusters and greedy capture.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::{gc_greedy_centroid, simulate, GcVariantConfig};
use crate::instance::{Cluster, Clustering, Instance};
use crate::loss::LossModel;
use crate::mcc::{MccMode, DEFAULT_MCC_BUDGET};

/// Growth factor and core guarantee of the dual-metric algorithm for a given
/// MCC approximation factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualMetricParams {
    pub alpha: f64,
    pub c: f64,
    pub core_bound: f64,
}

pub fn dual_metric_params(alpha: f64) -> Result<DualMetricParams> {
    if alpha.is_nan() || alpha < 1.0 {
        return Err(Error::AlphaBelowOne(alpha));
    }
    let root = (alpha * (alpha + 8.0)).sqrt();
    Ok(DualMetricParams {
        alpha,
        c: (3.0 * alpha + root) / (4.0 * alpha),
        core_bound: 0.5 * (alpha + root + 2.0),
    })
}

/// Upper bound on the final loss of `i` if it moves into phase-1 cluster `t`:
/// `d^c(i, x_t) + c·r_t + min_{j ∈ Ĉ_t} (d^m(i, j) − d^c(j, x_t))`.
pub fn phi(
    model: &LossModel,
    phase1: &Clustering,
    radii: &[f64],
    c: f64,
    i: usize,
    t: usize,
) -> f64 {
    let cl = &phase1.clusters[t];
    let slack = cl
        .members
        .iter()
        .map(|&j| model.nc(i, j) - model.c(j, cl.center))
        .fold(f64::INFINITY, f64::min);
    model.c(i, cl.center) + c * radii[t] + slack
}

/// A phase-2 move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Switch {
    pub agent: usize,
    /// Phase-1 cluster index the agent started in.
    pub from: usize,
    /// Phase-1 cluster index the agent moved to.
    pub to: usize,
    pub phi: f64,
}

/// Full record of a dual-metric run.
#[derive(Debug, Clone, PartialEq)]
pub struct DualMetricRun {
    pub params: DualMetricParams,
    /// Phase-1 clusters with their max losses as capture radii.
    pub phase1: Clustering,
    pub radii: Vec<f64>,
    pub switches: Vec<Switch>,
    /// Phase-1 cluster index of every final cluster.
    pub origin: Vec<usize>,
    pub clustering: Clustering,
}

impl DualMetricRun {
    /// Checks the two per-agent loss bounds that drive the core guarantee:
    /// every agent ends with loss at most `c·r_t` for its phase-1 cluster
    /// `t`, and every switcher ends with loss at most its `Φ`.
    pub fn check_loss_bounds(&self, model: &LossModel) -> std::result::Result<(), String> {
        let n = model.n();
        let losses = model.losses_unchecked(&self.clustering);
        let home = self.phase1.assignment(n);
        let tol = |v: f64| 1e-9 * v.abs().max(1.0);
        for i in 0..n {
            let cap = self.params.c * self.radii[home[i]];
            if losses[i] > cap + tol(cap) {
                return Err(format!("agent {i}: loss {} exceeds c·r = {cap}", losses[i]));
            }
        }
        for s in &self.switches {
            if losses[s.agent] > s.phi + tol(s.phi) {
                return Err(format!(
                    "switcher {}: loss {} exceeds Φ = {}",
                    s.agent, losses[s.agent], s.phi
                ));
            }
        }
        Ok(())
    }
}

pub fn dual_metric_cluster(inst: &Instance, mode: MccMode) -> Result<Clustering> {
    Ok(dual_metric_run(inst, mode, DEFAULT_MCC_BUDGET)?.clustering)
}

/// Dual-metric algorithm: peel off (approximate) most cohesive clusters,
/// then let agents in index order move to a cluster whose members it cannot
/// hurt much, when that lowers the bound on its own loss.
pub fn dual_metric_run(inst: &Instance, mode: MccMode, budget: f64) -> Result<DualMetricRun> {
    let model = LossModel::native(inst);
    let params = dual_metric_params(mode.alpha())?;
    let c = params.c;

    let (phase1, radii) = peel_mcc(inst, &model, mode, budget)?;
    let home = phase1.assignment(inst.n());
    let mut members: Vec<Vec<usize>> = phase1.clusters.iter().map(|c| c.members.clone()).collect();
    let mut switches = Vec::new();

    for (i, &t) in home.iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for (tp, cl) in phase1.clusters.iter().enumerate() {
            let admissible = cl
                .members
                .iter()
                .all(|&j| model.c(j, cl.center) + model.nc(j, i) <= c * radii[tp]);
            if !admissible {
                continue;
            }
            let value = phi(&model, &phase1, &radii, c, i, tp);
            if best.is_none_or(|(b, _)| value < b) {
                best = Some((value, tp));
            }
        }
        let (value, target) = best.expect("an agent's own cluster is always admissible");
        if target != t && value < c * radii[t] {
            members[t].retain(|&j| j != i);
            let pos = members[target].binary_search(&i).unwrap_err();
            members[target].insert(pos, i);
            switches.push(Switch {
                agent: i,
                from: t,
                to: target,
                phi: value,
            });
        }
    }

    let mut origin = Vec::new();
    let mut clusters = Vec::new();
    let mut final_radii = Vec::new();
    for (t, m) in members.into_iter().enumerate() {
        if !m.is_empty() {
            origin.push(t);
            final_radii.push(radii[t]);
            clusters.push(Cluster {
                members: m,
                center: phase1.clusters[t].center,
            });
        }
    }
    Ok(DualMetricRun {
        params,
        phase1,
        radii,
        switches,
        origin,
        clustering: Clustering {
            clusters,
            capture_radii: Some(final_radii),
        },
    })
}

/// Repeatedly extracts a most cohesive cluster from the uncaptured agents.
/// Returns the clusters and their max losses.
fn peel_mcc(
    inst: &Instance,
    model: &LossModel,
    mode: MccMode,
    budget: f64,
) -> Result<(Clustering, Vec<f64>)> {
    let mut pool: Vec<usize> = (0..inst.n()).collect();
    let mut clusters = Vec::new();
    let mut radii = Vec::new();
    while !pool.is_empty() {
        let found = mode.run(inst, model, &pool, budget)?;
        pool.retain(|j| found.members.binary_search(j).is_err());
        radii.push(found.max_loss);
        clusters.push(Cluster {
            members: found.members,
            center: found.center,
        });
    }
    Ok((
        Clustering {
            clusters,
            capture_radii: Some(radii.clone()),
        },
        radii,
    ))
}

/// Iterative most-cohesive-cluster clustering under `model`.
pub fn iterative_mcc_cluster(
    inst: &Instance,
    model: &LossModel,
    mode: MccMode,
) -> Result<Clustering> {
    iterative_mcc_cluster_with_budget(inst, model, mode, DEFAULT_MCC_BUDGET)
}

pub fn iterative_mcc_cluster_with_budget(
    inst: &Instance,
    model: &LossModel,
    mode: MccMode,
    budget: f64,
) -> Result<Clustering> {
    Ok(peel_mcc(inst, model, mode, budget)?.0)
}

/// Parameters of the semi-ball algorithm. For `λ = 0` the growth factor is
/// infinite; only `q = c·λ` enters the switching rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiBallParams {
    pub lambda: f64,
    pub q: f64,
    pub c: f64,
    pub core_bound: f64,
}

impl SemiBallParams {
    /// The gate `d(i, x_t) ≤ c·r_t` is vacuous.
    pub fn gate_always_open(&self) -> bool {
        self.lambda == 0.0
    }
}

pub fn semiball_params(lambda: f64) -> Result<SemiBallParams> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    let root = (2.0 * lambda - 11.0 * lambda * lambda + 13.0).sqrt();
    let q = (root + 5.0 * lambda - 1.0) / 6.0;
    Ok(SemiBallParams {
        lambda,
        q,
        c: if lambda > 0.0 {
            q / lambda
        } else {
            f64::INFINITY
        },
        core_bound: (root + 3.0 - lambda) / (2.0 - 2.0 * lambda),
    })
}

/// Semi-ball clustering with the instance's own `λ`.
pub fn semiball_cluster(inst: &Instance) -> Result<Clustering> {
    semiball_cluster_with_lambda(inst, inst.lambda().ok_or(Error::RequiresWeighted)?)
}

/// Balls open at centers without growing; each agent then moves, in index
/// order, to the reachable cluster with the smallest loss bound when that
/// beats the bound of staying.
pub fn semiball_cluster_with_lambda(inst: &Instance, lambda: f64) -> Result<Clustering> {
    let params = semiball_params(lambda)?;
    inst.single_metric()?;
    let balls = simulate(inst, GcVariantConfig::SEMIBALL_PHASE1);
    let centers: Vec<usize> = balls.iter().map(|b| b.center).collect();
    let radii: Vec<f64> = balls.iter().map(|b| b.radius).collect();
    let mut home = vec![0; inst.n()];
    for (t, b) in balls.iter().enumerate() {
        for &i in &b.members {
            home[i] = t;
        }
    }
    let mut members: Vec<Vec<usize>> = balls.into_iter().map(|b| b.members).collect();

    let q = params.q;
    for (i, &own) in home.iter().enumerate() {
        let mut best: Option<(f64, usize)> = None;
        for (t, (&x, &r)) in centers.iter().zip(&radii).enumerate() {
            let d = inst.center_dist(i, x);
            if !params.gate_always_open() && d > params.c * r {
                continue;
            }
            let value = (1.0 - lambda) * d + 2.0 * q * r;
            if best.is_none_or(|(b, _)| value < b) {
                best = Some((value, t));
            }
        }
        let (value, target) = best.expect("an agent's own ball passes the gate");
        let stay = inst.center_dist(i, centers[own]) + q * radii[own];
        if target != own && value < stay {
            members[own].retain(|&j| j != i);
            let pos = members[target].binary_search(&i).unwrap_err();
            members[target].insert(pos, i);
        }
    }

    let mut clusters = Vec::new();
    let mut kept_radii = Vec::new();
    for (t, m) in members.into_iter().enumerate() {
        if !m.is_empty() {
            clusters.push(Cluster {
                members: m,
                center: centers[t],
            });
            kept_radii.push(radii[t]);
        }
    }
    Ok(Clustering {
        clusters,
        capture_radii: Some(kept_radii),
    })
}

/// Which weighted-loss algorithm has the better guarantee at `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightedChoice {
    GreedyCentroid,
    SemiBall,
}

/// Picks greedy capture with greedy centroid selection when `2/λ ≤ f_λ` and
/// the semi-ball algorithm otherwise.
pub fn weighted_choice(lambda: f64) -> Result<WeightedChoice> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    if lambda == 1.0 {
        return Ok(WeightedChoice::GreedyCentroid);
    }
    let f = semiball_params(lambda)?.core_bound;
    Ok(if 2.0 / lambda <= f {
        WeightedChoice::GreedyCentroid
    } else {
        WeightedChoice::SemiBall
    })
}

/// Best-guarantee polynomial-time clustering for a weighted instance.
pub fn weighted_cluster(inst: &Instance) -> Result<Clustering> {
    let lambda = inst.lambda().ok_or(Error::RequiresWeighted)?;
    match weighted_choice(lambda)? {
        WeightedChoice::GreedyCentroid => Ok(gc_greedy_centroid(inst, inst.single_metric()?)),
        WeightedChoice::SemiBall => semiball_cluster_with_lambda(inst, lambda),
    }
}
