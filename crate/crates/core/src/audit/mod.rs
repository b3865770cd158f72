//! Core and FJR violation audits.
//!
//! For a coalition `S` and center `y`, write `ρ(i, j) = t_i / (nc(i, j) +
//! c(i, y))` with the conventions of [`ratio`], where `t_i` is `ℓ_i(X)` for
//! the core and a threshold `L` for FJR. Because the non-centroid loss is a
//! maximum over pairs, the coalition's value is `min_{i, j ∈ S} ρ(i, j)`
//! (the diagonal included). So a deviation at level `α` exists exactly when
//! the graph with vertices `ρ(i, i) ≥ α` and edges `min(ρ(i, j), ρ(j, i)) ≥
//! α` has a clique of size `⌈n/k⌉`. The exact audit binary-searches `α` over
//! the finite set of `ρ` values.

pub mod clique;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::instance::{Clustering, Deviation, Instance};
use crate::loss::{LossModel, LossTarget};
use crate::util::{binomial, for_each_combination, ratio};
use clique::{find_clique, CliqueOutcome, Graph};

/// Default cap on `(S, y)` pairs for brute force.
pub const DEFAULT_BRUTE_BUDGET: f64 = 5e7;

/// Default cap on search nodes per clique query.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Core,
    Fjr,
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Criterion::Core => "core",
            Criterion::Fjr => "fjr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub brute_budget: f64,
    pub node_budget: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            brute_budget: DEFAULT_BRUTE_BUDGET,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub criterion: Criterion,
    pub loss_target: LossTarget,
    /// At least 1; `∞` is serialized as the string `"inf"`.
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub violation: f64,
    pub witness: Option<Deviation>,
    /// Set when a clique search ran out of budget, so `violation` is only a
    /// lower bound.
    #[serde(default)]
    pub lower_bound: bool,
}

fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_extended<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }
    match Repr::deserialize(d)? {
        Repr::Num(v) => Ok(v),
        Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
        Repr::Text(t) => Err(serde::de::Error::custom(format!(
            "bad violation value {t:?}"
        ))),
    }
}

/// Value of the deviation `(S, y)` against current losses.
pub fn deviation_value(
    model: &LossModel,
    losses: &[f64],
    criterion: Criterion,
    s: &[usize],
    y: usize,
) -> f64 {
    match criterion {
        Criterion::Core => s
            .iter()
            .map(|&i| ratio(losses[i], model.loss_unchecked(i, s, y)))
            .fold(f64::INFINITY, f64::min),
        Criterion::Fjr => {
            let floor = s.iter().map(|&j| losses[j]).fold(f64::INFINITY, f64::min);
            ratio(floor, model.max_loss(s, y))
        }
    }
}

fn report(
    criterion: Criterion,
    model: &LossModel,
    best: Option<(f64, Deviation)>,
    lower_bound: bool,
) -> AuditReport {
    let (violation, witness) = match best {
        Some((v, w)) if v > 1.0 => (v, Some(w)),
        _ => (1.0, None),
    };
    AuditReport {
        criterion,
        loss_target: model.target(),
        violation,
        witness,
        lower_bound,
    }
}

/// Enumerates every coalition of size `⌈n/k⌉` and every center.
pub fn bruteforce_violation(
    inst: &Instance,
    model: &LossModel,
    x: &Clustering,
    criterion: Criterion,
) -> Result<AuditReport> {
    bruteforce_violation_with_budget(inst, model, x, criterion, DEFAULT_BRUTE_BUDGET)
}

pub fn bruteforce_violation_with_budget(
    inst: &Instance,
    model: &LossModel,
    x: &Clustering,
    criterion: Criterion,
    budget: f64,
) -> Result<AuditReport> {
    let losses = model.clustering_losses(inst, x)?;
    let theta = inst.threshold();
    let evaluations = binomial(inst.n(), theta) * inst.m() as f64;
    if evaluations > budget {
        return Err(Error::BudgetExceeded {
            evaluations,
            budget,
        });
    }
    let agents: Vec<usize> = (0..inst.n()).collect();
    let mut best: Option<(f64, Deviation)> = None;
    for_each_combination(&agents, theta, |s| {
        for y in 0..inst.m() {
            let v = deviation_value(model, &losses, criterion, s, y);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((
                    v,
                    Deviation {
                        members: s.to_vec(),
                        center: y,
                    },
                ));
            }
        }
        true
    });
    Ok(report(criterion, model, best, false))
}

/// Per-center ratio table for one target vector.
struct RatioTable {
    /// Eligible agents, ascending.
    agents: Vec<usize>,
    /// `vertex[a] = ρ(i, i)` for `i = agents[a]`.
    vertex: Vec<f64>,
    /// `pair[a][b] = min(ρ(i, j), ρ(j, i))`.
    pair: Vec<Vec<f64>>,
}

impl RatioTable {
    fn build(
        model: &LossModel,
        y: usize,
        agents: Vec<usize>,
        target: impl Fn(usize) -> f64,
    ) -> Self {
        let rho = |i: usize, j: usize| ratio(target(i), model.nc(i, j) + model.c(i, y));
        let vertex = agents
            .iter()
            .map(|&i| ratio(target(i), model.c(i, y)))
            .collect();
        let pair = agents
            .iter()
            .map(|&i| agents.iter().map(|&j| rho(i, j).min(rho(j, i))).collect())
            .collect();
        Self {
            agents,
            vertex,
            pair,
        }
    }

    /// Graph on table positions with every ratio at least `alpha`.
    fn graph(&self, alpha: f64, strict: bool) -> (Vec<usize>, Graph) {
        let pass = |v: f64| if strict { v > alpha } else { v >= alpha };
        let verts: Vec<usize> = (0..self.agents.len())
            .filter(|&a| pass(self.vertex[a]))
            .collect();
        let mut g = Graph::new(verts.len());
        for (p, &a) in verts.iter().enumerate() {
            for (q, &b) in verts.iter().enumerate().skip(p + 1) {
                if pass(self.pair[a][b]) {
                    g.add_edge(p, q);
                }
            }
        }
        (verts, g)
    }

    /// Largest candidate level above `floor` that admits a clique of size
    /// `theta`, with the clique (as agent indices). The flag reports an
    /// exhausted search.
    fn best_level(
        &self,
        theta: usize,
        floor: f64,
        node_budget: u64,
    ) -> (Option<(f64, Vec<usize>)>, bool) {
        let mut levels: Vec<f64> = self
            .vertex
            .iter()
            .copied()
            .chain(self.pair.iter().flatten().copied())
            .filter(|&v| v > floor)
            .collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let mut exhausted = false;
        let mut probe = |alpha: f64| -> Option<Vec<usize>> {
            let (verts, g) = self.graph(alpha, false);
            match find_clique(&g, theta, node_budget) {
                CliqueOutcome::Found(c) => {
                    Some(c.into_iter().map(|p| self.agents[verts[p]]).collect())
                }
                CliqueOutcome::NotFound => None,
                CliqueOutcome::Exhausted => {
                    exhausted = true;
                    None
                }
            }
        };
        let Some(first) = levels.first().copied() else {
            return (None, false);
        };
        let Some(mut witness) = probe(first) else {
            return (None, exhausted);
        };
        // invariant: levels[lo] feasible, levels[hi..] infeasible
        let (mut lo, mut hi) = (0, levels.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            match probe(levels[mid]) {
                Some(c) => {
                    lo = mid;
                    witness = c;
                }
                None => hi = mid,
            }
        }
        (Some((levels[lo], witness)), exhausted)
    }
}

fn eligible_targets(criterion: Criterion, losses: &[f64]) -> Vec<Option<f64>> {
    match criterion {
        Criterion::Core => vec![None],
        Criterion::Fjr => {
            let mut ls: Vec<f64> = losses.to_vec();
            ls.sort_by(f64::total_cmp);
            ls.dedup();
            ls.into_iter().map(Some).collect()
        }
    }
}

/// Graph of agents that can join a deviation to `y` whose every member
/// improves by a factor strictly above `alpha`: vertices keep agents whose
/// own centroid term already allows it, edges join pairs that can coexist.
/// For FJR, `threshold` is the common target `L` and only agents with
/// `ℓ_i(X) ≥ L` take part. Returns the agent behind each vertex.
pub fn deviation_graph(
    inst: &Instance,
    model: &LossModel,
    x: &Clustering,
    y: usize,
    alpha: f64,
    threshold: Option<f64>,
) -> Result<(Vec<usize>, Graph)> {
    let losses = model.clustering_losses(inst, x)?;
    let agents = (0..inst.n())
        .filter(|&i| threshold.is_none_or(|l| losses[i] >= l))
        .collect();
    let table = RatioTable::build(model, y, agents, |i| threshold.unwrap_or(losses[i]));
    let (verts, g) = table.graph(alpha, true);
    Ok((verts.into_iter().map(|a| table.agents[a]).collect(), g))
}

/// Exact violation via clique search. Matches [`bruteforce_violation`] and
/// scales to larger instances.
pub fn exact_violation(
    inst: &Instance,
    model: &LossModel,
    x: &Clustering,
    criterion: Criterion,
) -> Result<AuditReport> {
    exact_violation_with_options(inst, model, x, criterion, AuditOptions::default())
}

pub fn exact_violation_with_options(
    inst: &Instance,
    model: &LossModel,
    x: &Clustering,
    criterion: Criterion,
    opts: AuditOptions,
) -> Result<AuditReport> {
    let losses = model.clustering_losses(inst, x)?;
    let theta = inst.threshold();
    let mut best: Option<(f64, Deviation)> = None;
    let mut lower_bound = false;
    let thresholds = eligible_targets(criterion, &losses);
    for y in 0..inst.m() {
        for &l in &thresholds {
            let floor = best.as_ref().map_or(1.0, |(b, _)| *b);
            let table = match l {
                None => RatioTable::build(model, y, (0..inst.n()).collect(), |i| losses[i]),
                Some(l) => {
                    let agents: Vec<usize> = (0..inst.n()).filter(|&i| losses[i] >= l).collect();
                    if agents.len() < theta {
                        continue;
                    }
                    RatioTable::build(model, y, agents, |_| l)
                }
            };
            let (found, exhausted) = table.best_level(theta, floor, opts.node_budget);
            lower_bound |= exhausted;
            if let Some((v, members)) = found {
                best = Some((v, Deviation { members, center: y }));
            }
        }
    }
    Ok(report(criterion, model, best, lower_bound))
}

/// Audits with brute force when it fits in the budget, else exactly.
pub fn audit(
    inst: &Instance,
    model: &LossModel,
    x: &Clustering,
    criterion: Criterion,
    opts: AuditOptions,
) -> Result<AuditReport> {
    match bruteforce_violation_with_budget(inst, model, x, criterion, opts.brute_budget) {
        Err(Error::BudgetExceeded { .. }) => {
            exact_violation_with_options(inst, model, x, criterion, opts)
        }
        other => other,
    }
}
