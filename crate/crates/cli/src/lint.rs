//! Post-hoc check of reported violations against each algorithm's proven
//! guarantee under the weighted loss.

use semicentroid::fair::{dual_metric_params, semiball_params};

use crate::experiment::Algorithm;
use crate::report::{LongRow, Metric, Status};

/// Relative slack for floating-point noise.
pub const LINT_TOLERANCE: f64 = 1e-9;

/// Proven upper bound on `metric` for `algorithm` at `λ`, if any. An
/// `α`-core clustering is also `α`-FJR, so core bounds carry over.
pub fn guarantee(algorithm: Algorithm, metric: Metric, lambda: f64) -> Option<f64> {
    let core = match algorithm {
        Algorithm::Gc => (lambda > 0.0).then(|| 2.0 / lambda),
        Algorithm::Semiball => semiball_params(lambda).ok().map(|p| p.core_bound),
        Algorithm::Dual3 => Some(dual_metric_params(1.0).ok()?.core_bound),
        Algorithm::DualPoly => Some(dual_metric_params(4.0).ok()?.core_bound),
        Algorithm::IterMcc | Algorithm::Kmeanspp | Algorithm::Kmedoids => None,
    };
    match metric {
        Metric::CoreViolation => core,
        Metric::FjrViolation if algorithm == Algorithm::IterMcc => Some(1.0),
        Metric::FjrViolation => core,
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LintFinding {
    pub row: LongRow,
    pub bound: f64,
}

/// Rows whose value exceeds the guarantee. Lower-bound values count too:
/// the true violation is at least that large.
pub fn lint(rows: &[LongRow]) -> Vec<LintFinding> {
    rows.iter()
        .filter(|r| matches!(r.status, Status::Ok | Status::LowerBound))
        .filter_map(|r| {
            let bound = guarantee(r.algorithm, r.metric, r.lambda)?;
            let v = r.value?;
            (v > bound + LINT_TOLERANCE * bound.max(1.0)).then(|| LintFinding {
                row: r.clone(),
                bound,
            })
        })
        .collect()
}
