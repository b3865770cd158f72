//! Most cohesive clusters: the size-`θ′` cluster and center minimizing the
//! largest member loss, exactly or within a factor of four.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::capture_from_pool;
use crate::instance::Instance;
use crate::loss::LossModel;
use crate::metric::DistanceMatrix;
use crate::util::{binomial, for_each_combination};

/// Default cap on evaluated `(C, x)` pairs for exact enumeration.
pub const DEFAULT_MCC_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MccResult {
    /// Members in ascending order.
    pub members: Vec<usize>,
    pub center: usize,
    pub max_loss: f64,
}

/// How a most cohesive cluster is found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MccMode {
    Exact,
    Approx4,
}

impl MccMode {
    /// Guaranteed approximation factor.
    pub fn alpha(self) -> f64 {
        match self {
            MccMode::Exact => 1.0,
            MccMode::Approx4 => 4.0,
        }
    }

    pub(crate) fn run(
        self,
        inst: &Instance,
        model: &LossModel,
        pool: &[usize],
        budget: f64,
    ) -> Result<MccResult> {
        match self {
            MccMode::Exact => exact_mcc_with_budget(inst, model, pool, budget),
            MccMode::Approx4 => approx_mcc4(inst, model, pool),
        }
    }
}

/// Size of the clusters searched from `pool`: `min(|pool|, ⌈n/k⌉)`.
pub fn pool_threshold(inst: &Instance, pool: &[usize]) -> usize {
    inst.threshold().min(pool.len())
}

pub fn exact_mcc(inst: &Instance, model: &LossModel, pool: &[usize]) -> Result<MccResult> {
    exact_mcc_with_budget(inst, model, pool, DEFAULT_MCC_BUDGET)
}

/// Enumerates every size-`θ′` subset of `pool` and every center. Ties go to
/// the lexicographically first subset, then the lowest center index.
pub fn exact_mcc_with_budget(
    inst: &Instance,
    model: &LossModel,
    pool: &[usize],
    budget: f64,
) -> Result<MccResult> {
    let pool = sorted_pool(pool)?;
    let size = pool_threshold(inst, &pool);
    let evaluations = binomial(pool.len(), size) * inst.m() as f64;
    if evaluations > budget {
        return Err(Error::PoolTooLargeForExact {
            evaluations,
            budget,
        });
    }
    let mut best: Option<MccResult> = None;
    let mut spread = vec![0.0; size];
    for_each_combination(&pool, size, |c| {
        for (slot, &i) in spread.iter_mut().zip(c) {
            *slot = model.noncentroid_part(i, c);
        }
        for x in 0..inst.m() {
            let worst = c
                .iter()
                .zip(&spread)
                .map(|(&i, &s)| s + model.c(i, x))
                .fold(0.0, f64::max);
            if best.as_ref().is_none_or(|b| worst < b.max_loss) {
                best = Some(MccResult {
                    members: c.to_vec(),
                    center: x,
                    max_loss: worst,
                });
            }
        }
        true
    });
    Ok(best.expect("pool is nonempty"))
}

fn sorted_pool(pool: &[usize]) -> Result<Vec<usize>> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut p = pool.to_vec();
    p.sort_unstable();
    p.dedup();
    Ok(p)
}

/// `d_y(i, j) = d^m(i, j) + d^c(i, y) + d^c(j, y)` for `i ≠ j`, zero on the
/// diagonal, over the agents.
pub fn crafted_metric(model: &LossModel, y: usize) -> DistanceMatrix {
    DistanceMatrix::from_fn(model.n(), |i, j| crafted(model, y, i, j))
}

#[inline]
fn crafted(model: &LossModel, y: usize, i: usize, j: usize) -> f64 {
    if i == j {
        0.0
    } else {
        model.nc(i, j) + model.c(i, y) + model.c(j, y)
    }
}

/// For every center `y`, the first non-centroid greedy capture ball under
/// `d_y`; keeps the one with the smallest max loss (lowest `y` on ties).
pub fn approx_mcc4(inst: &Instance, model: &LossModel, pool: &[usize]) -> Result<MccResult> {
    let pool = sorted_pool(pool)?;
    let size = pool_threshold(inst, &pool);
    let mut best: Option<MccResult> = None;
    for y in 0..inst.m() {
        let ball = capture_from_pool(|i, j| crafted(model, y, i, j), &pool, size, Some(1))
            .pop()
            .expect("pool is nonempty");
        let max_loss = model.max_loss(&ball.members, y);
        if best.as_ref().is_none_or(|b| max_loss < b.max_loss) {
            best = Some(MccResult {
                members: ball.members,
                center: y,
                max_loss,
            });
        }
    }
    Ok(best.expect("instances have at least one center"))
}
