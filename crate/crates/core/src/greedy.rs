//! Greedy capture.
//!
//! Balls grow at a common rate `δ`; a ball opens once it covers enough
//! uncaptured agents. The continuous sweep is replaced by discrete events,
//! ordered by `(δ, kind, site, agent)` with openings before growth steps.
//! An event whose natural radius is already below the current `δ` fires at
//! the current `δ`, which keeps recorded radii nondecreasing.

use serde::{Deserialize, Serialize};

use crate::instance::{Cluster, Clustering, Instance};
use crate::metric::DistanceMatrix;
use crate::util::by_dist_then_index;

/// A ball captured by non-centroid greedy capture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapturedBall {
    /// Agent around which the ball grew.
    pub owner: usize,
    /// Captured agents in ascending order.
    pub members: Vec<usize>,
    /// Value of `δ` when the ball opened.
    pub radius: f64,
}

/// Non-centroid greedy capture over all agents with metric `d`.
pub fn noncentroid_greedy_capture(inst: &Instance, d: &DistanceMatrix) -> Vec<CapturedBall> {
    let pool: Vec<usize> = (0..inst.n()).collect();
    capture_from_pool(|i, j| d.get(i, j), &pool, inst.threshold(), None)
}

/// Runs non-centroid greedy capture on `pool` with coalition threshold
/// `theta`, stopping after `limit` balls when given.
pub(crate) fn capture_from_pool(
    d: impl Fn(usize, usize) -> f64,
    pool: &[usize],
    theta: usize,
    limit: Option<usize>,
) -> Vec<CapturedBall> {
    let mut remaining: Vec<usize> = pool.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut balls = Vec::new();
    let mut delta = 0.0f64;
    while !remaining.is_empty() && limit.is_none_or(|l| balls.len() < l) {
        let size = theta.min(remaining.len());
        let mut best: Option<(f64, usize, Vec<usize>)> = None;
        for &i in &remaining {
            let dist = |j: usize| if i == j { 0.0 } else { d(i, j) };
            let nearest = nearest_to_site(&remaining, size, dist, Some(i));
            let radius = nearest.last().map_or(0.0, |&(r, _)| r).max(delta);
            if best.as_ref().is_none_or(|b| radius < b.0) {
                best = Some((radius, i, nearest.iter().map(|&(_, j)| j).collect()));
            }
        }
        let (radius, owner, mut members) = best.expect("remaining is nonempty");
        delta = radius;
        members.sort_unstable();
        remaining.retain(|j| members.binary_search(j).is_err());
        balls.push(CapturedBall {
            owner,
            members,
            radius,
        });
    }
    balls
}

/// The `size` agents of `candidates` closest to a site, ordered by
/// distance, then with the site's own agent first, then by index.
fn nearest_to_site(
    candidates: &[usize],
    size: usize,
    dist: impl Fn(usize) -> f64,
    own: Option<usize>,
) -> Vec<(f64, usize)> {
    let mut ds: Vec<(f64, usize)> = candidates.iter().map(|&j| (dist(j), j)).collect();
    ds.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| (Some(b.1) == own).cmp(&(Some(a.1) == own)))
            .then(a.1.cmp(&b.1))
    });
    ds.truncate(size);
    ds
}

/// Non-centroid greedy capture, then each ball is centered at the feasible
/// center nearest to its owner under `d` (lowest center index on ties). `d`
/// covers agents and center points.
pub fn gc_greedy_centroid(inst: &Instance, d: &DistanceMatrix) -> Clustering {
    let balls = noncentroid_greedy_capture(inst, d);
    let mut radii = Vec::with_capacity(balls.len());
    let clusters = balls
        .into_iter()
        .map(|b| {
            radii.push(b.radius);
            Cluster {
                center: nearest_center(inst, d, b.owner),
                members: b.members,
            }
        })
        .collect();
    Clustering {
        clusters,
        capture_radii: Some(radii),
    }
}

fn nearest_center(inst: &Instance, d: &DistanceMatrix, point: usize) -> usize {
    let points = inst.center_points();
    (0..inst.m())
        .map(|x| (d.get(point, points[x]), x))
        .min_by(by_dist_then_index)
        .map(|(_, x)| x)
        .expect("instances have at least one center")
}

/// Where balls grow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallSites {
    Agents,
    Centers,
}

/// The design space of greedy capture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GcVariantConfig {
    pub balls_at: BallSites,
    /// Open balls keep capturing agents as `δ` grows.
    pub open_balls_grow: bool,
    /// After capture, every agent moves to its nearest chosen center.
    pub final_switch: bool,
    /// Opening balls capture exactly `min(|N'|, ⌈n/k⌉)` agents instead of
    /// every uncaptured agent inside the radius.
    pub balanced_capture: bool,
}

impl GcVariantConfig {
    /// Centroid greedy capture.
    pub const CENTROID: Self = Self {
        balls_at: BallSites::Centers,
        open_balls_grow: true,
        final_switch: true,
        balanced_capture: false,
    };

    /// Non-centroid greedy capture with greedy centroid selection.
    pub const NONCENTROID: Self = Self {
        balls_at: BallSites::Agents,
        open_balls_grow: false,
        final_switch: false,
        balanced_capture: true,
    };

    /// Ball opening at centers without growth or switching.
    pub(crate) const SEMIBALL_PHASE1: Self = Self {
        balls_at: BallSites::Centers,
        open_balls_grow: false,
        final_switch: false,
        balanced_capture: false,
    };
}

/// A ball as opened by [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct OpenedBall {
    pub site: usize,
    pub center: usize,
    pub members: Vec<usize>,
    pub radius: f64,
}

/// Centroid greedy capture: balls at centers, growing after opening, and a
/// final move of every agent to its nearest opened center.
pub fn centroid_greedy_capture(inst: &Instance) -> Clustering {
    gc_variant(inst, GcVariantConfig::CENTROID)
}

/// Generic greedy capture over the centroid metric of `inst`.
pub fn gc_variant(inst: &Instance, cfg: GcVariantConfig) -> Clustering {
    let balls = simulate(inst, cfg);
    if cfg.final_switch {
        switch_to_nearest(inst, &balls)
    } else {
        Clustering {
            capture_radii: Some(balls.iter().map(|b| b.radius).collect()),
            clusters: balls
                .into_iter()
                .map(|b| Cluster {
                    members: b.members,
                    center: b.center,
                })
                .collect(),
        }
    }
}

pub(crate) fn simulate(inst: &Instance, cfg: GcVariantConfig) -> Vec<OpenedBall> {
    let n = inst.n();
    let space = inst.space();
    let points = inst.center_points();
    let at_agents = cfg.balls_at == BallSites::Agents;
    let site_dist = |s: usize, i: usize| {
        if at_agents {
            if s == i {
                0.0
            } else {
                space.get(i, s)
            }
        } else {
            space.get(i, points[s])
        }
    };
    let sites = if at_agents { n } else { inst.m() };
    let theta = inst.threshold();

    let mut captured = vec![false; n];
    let mut uncaptured: Vec<usize> = (0..n).collect();
    let mut growing = vec![false; sites];
    let mut balls: Vec<OpenedBall> = Vec::new();
    let mut delta = 0.0f64;

    while !uncaptured.is_empty() {
        // growing balls absorb the last few agents, so only the
        // non-growing variants lower the opening size at the end
        let size = if cfg.open_balls_grow {
            theta
        } else {
            theta.min(uncaptured.len())
        };
        // (time, kind, site, agent); kind 0 opens, 1 grows
        let mut best: Option<(f64, u8, usize, usize)> = None;
        let better = |cand: (f64, u8, usize, usize), best: &Option<(f64, u8, usize, usize)>| {
            best.is_none_or(|b| {
                cand.0
                    .total_cmp(&b.0)
                    .then(cand.1.cmp(&b.1))
                    .then(cand.2.cmp(&b.2))
                    .then(cand.3.cmp(&b.3))
                    .is_lt()
            })
        };
        for s in 0..sites {
            if (at_agents && captured[s]) || growing[s] || size > uncaptured.len() {
                continue;
            }
            let own = at_agents.then_some(s);
            let nearest = nearest_to_site(&uncaptured, size, |i| site_dist(s, i), own);
            let time = nearest[size - 1].0.max(delta);
            let cand = (time, 0, s, 0);
            if better(cand, &best) {
                best = Some(cand);
            }
        }
        if cfg.open_balls_grow {
            for b in &balls {
                for &i in &uncaptured {
                    let cand = (site_dist(b.site, i).max(delta), 1, b.site, i);
                    if better(cand, &best) {
                        best = Some(cand);
                    }
                }
            }
        }

        let (time, kind, site, agent) = best.expect("some site can always open");
        delta = time;
        if kind == 0 {
            let own = at_agents.then_some(site);
            let mut members: Vec<usize> = if cfg.balanced_capture {
                nearest_to_site(&uncaptured, size, |i| site_dist(site, i), own)
                    .into_iter()
                    .map(|(_, i)| i)
                    .collect()
            } else {
                uncaptured
                    .iter()
                    .copied()
                    .filter(|&i| site_dist(site, i) <= time)
                    .collect()
            };
            members.sort_unstable();
            let center = if at_agents {
                nearest_center(inst, space, site)
            } else {
                site
            };
            if cfg.open_balls_grow {
                growing[site] = true;
            }
            for &i in &members {
                captured[i] = true;
            }
            balls.push(OpenedBall {
                site,
                center,
                members,
                radius: time,
            });
        } else {
            captured[agent] = true;
            let ball = balls
                .iter_mut()
                .find(|b| b.site == site)
                .expect("growth events refer to open balls");
            let pos = ball.members.binary_search(&agent).unwrap_err();
            ball.members.insert(pos, agent);
        }
        uncaptured.retain(|&i| !captured[i]);
    }
    balls
}

/// Sends every agent to its nearest chosen center (lowest center index on
/// ties). Clusters follow the order in which their centers first opened;
/// centers that attract nobody are dropped.
fn switch_to_nearest(inst: &Instance, balls: &[OpenedBall]) -> Clustering {
    let mut chosen: Vec<(usize, f64)> = Vec::new();
    for b in balls {
        if !chosen.iter().any(|&(x, _)| x == b.center) {
            chosen.push((b.center, b.radius));
        }
    }
    let mut by_index: Vec<usize> = (0..chosen.len()).collect();
    by_index.sort_by_key(|&t| chosen[t].0);
    let mut members = vec![Vec::new(); chosen.len()];
    for i in 0..inst.n() {
        let t = by_index
            .iter()
            .copied()
            .map(|t| (inst.center_dist(i, chosen[t].0), t))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, t)| t)
            .expect("at least one ball opened");
        members[t].push(i);
    }
    let mut clusters = Vec::new();
    let mut radii = Vec::new();
    for (t, m) in members.into_iter().enumerate() {
        if !m.is_empty() {
            clusters.push(Cluster {
                members: m,
                center: chosen[t].0,
            });
            radii.push(chosen[t].1);
        }
    }
    Clustering {
        clusters,
        capture_radii: Some(radii),
    }
}
