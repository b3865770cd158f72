//! Seeded sampling experiments: every algorithm on every `(λ, k)` cell of
//! every trial, audited and scored.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use semicentroid::audit::{bruteforce_violation_with_budget, exact_violation_with_options};
use semicentroid::baselines::{k_medoids, kmeans_pp, objectives};
use semicentroid::fair::{dual_metric_cluster, iterative_mcc_cluster, semiball_cluster};
use semicentroid::greedy::gc_greedy_centroid;
use semicentroid::mcc::MccMode;
use semicentroid::{AuditOptions, Clustering, Criterion, Instance, LossModel};

use crate::dataset::{ingest_csv, Dataset, Schema};
use crate::error::{CliError, Result};
use crate::report::{LongRow, Metric, ResultTable, Status};

#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Greedy capture with greedy centroid selection.
    #[value(name = "gc")]
    Gc,
    #[value(name = "semiball")]
    Semiball,
    /// Dual-metric algorithm with exact most cohesive clusters.
    #[value(name = "dual3")]
    Dual3,
    /// Dual-metric algorithm with 4-approximate most cohesive clusters.
    #[value(name = "dual_poly")]
    DualPoly,
    /// Iterative exact most cohesive clusters.
    #[value(name = "iter_mcc")]
    IterMcc,
    #[value(name = "kmeanspp")]
    Kmeanspp,
    #[value(name = "kmedoids")]
    Kmedoids,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Gc,
        Algorithm::Semiball,
        Algorithm::Dual3,
        Algorithm::DualPoly,
        Algorithm::IterMcc,
        Algorithm::Kmeanspp,
        Algorithm::Kmedoids,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gc => "gc",
            Algorithm::Semiball => "semiball",
            Algorithm::Dual3 => "dual3",
            Algorithm::DualPoly => "dual_poly",
            Algorithm::IterMcc => "iter_mcc",
            Algorithm::Kmeanspp => "kmeanspp",
            Algorithm::Kmedoids => "kmedoids",
        }
    }

    /// `seed` only matters for k-means++.
    pub fn run(self, inst: &Instance, seed: u64) -> semicentroid::Result<Clustering> {
        match self {
            Algorithm::Gc => Ok(gc_greedy_centroid(inst, inst.single_metric()?)),
            Algorithm::Semiball => semiball_cluster(inst),
            Algorithm::Dual3 => dual_metric_cluster(inst, MccMode::Exact),
            Algorithm::DualPoly => dual_metric_cluster(inst, MccMode::Approx4),
            Algorithm::IterMcc => {
                iterative_mcc_cluster(inst, &LossModel::native(inst), MccMode::Exact)
            }
            Algorithm::Kmeanspp => Ok(kmeans_pp(inst, seed)?.clustering),
            Algorithm::Kmedoids => Ok(k_medoids(inst).clustering),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AuditMode {
    /// Enumerate every coalition; cells over budget are marked.
    #[default]
    Brute,
    /// Clique search; cells that exhaust the node budget report a lower bound.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    #[serde(default)]
    pub numeric: Vec<String>,
    #[serde(default)]
    pub categorical: Vec<String>,
    #[serde(default = "defaults::algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "defaults::lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "defaults::k_grid")]
    pub k_grid: Vec<usize>,
    #[serde(default = "defaults::sample_size")]
    pub sample_size: usize,
    #[serde(default = "defaults::trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub audit_mode: AuditMode,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

pub mod defaults {
    use super::Algorithm;

    pub fn algorithms() -> Vec<Algorithm> {
        vec![
            Algorithm::Gc,
            Algorithm::Semiball,
            Algorithm::Kmeanspp,
            Algorithm::Kmedoids,
        ]
    }

    pub fn lambda_grid() -> Vec<f64> {
        (1..=9).map(|i| i as f64 / 10.0).collect()
    }

    pub fn k_grid() -> Vec<usize> {
        vec![4, 6, 8]
    }

    pub fn sample_size() -> usize {
        24
    }

    pub fn trials() -> usize {
        10
    }
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<PathBuf>) -> Self {
        Self {
            dataset: dataset.into(),
            numeric: Vec::new(),
            categorical: Vec::new(),
            algorithms: defaults::algorithms(),
            lambda_grid: defaults::lambda_grid(),
            k_grid: defaults::k_grid(),
            sample_size: defaults::sample_size(),
            trials: defaults::trials(),
            seed: 0,
            audit_mode: AuditMode::Brute,
            output: None,
        }
    }

    pub fn schema(&self) -> Schema {
        Schema {
            numeric: self.numeric.clone(),
            categorical: self.categorical.clone(),
        }
    }

    pub fn validate(&self, rows: usize) -> Result<()> {
        let bad = |m: String| Err(CliError::InvalidConfig(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.sample_size == 0 || self.sample_size > rows {
            return bad(format!(
                "sample size {} not in 1..={rows}",
                self.sample_size
            ));
        }
        if let Some(l) = self.lambda_grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return bad(format!("lambda {l} outside [0, 1]"));
        }
        if self.k_grid.contains(&0) {
            return bad("k must be positive".into());
        }
        Ok(())
    }
}

/// The generator for trial `t`: one stream per trial, so adding trials
/// leaves earlier ones unchanged.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Sorted sample of `size` distinct rows.
pub fn sample_rows(rng: &mut ChaCha8Rng, rows: usize, size: usize) -> Vec<usize> {
    let mut idx = rand::seq::index::sample(rng, rows, size).into_vec();
    idx.sort_unstable();
    idx
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let data = ingest_csv(&cfg.dataset, &cfg.schema())?;
    run_on_dataset(&data, cfg)
}

pub fn run_on_dataset(data: &Dataset, cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate(data.len())?;
    let per_trial: Vec<Vec<LongRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(data, cfg, trial))
        .collect::<Result<_>>()?;
    Ok(ResultTable::from_long(
        per_trial.into_iter().flatten().collect(),
    ))
}

fn run_trial(data: &Dataset, cfg: &ExperimentConfig, trial: usize) -> Result<Vec<LongRow>> {
    let mut rng = trial_rng(cfg.seed, trial);
    let rows = sample_rows(&mut rng, data.len(), cfg.sample_size);
    let algo_seed = rng.next_u64();
    let mut out = Vec::new();
    for &lambda in &cfg.lambda_grid {
        for &k in &cfg.k_grid {
            let inst = data.instance(&rows, k.min(rows.len()), lambda)?;
            for &algorithm in &cfg.algorithms {
                let push = |out: &mut Vec<LongRow>, metric, value, status| {
                    out.push(LongRow {
                        trial,
                        lambda,
                        k,
                        algorithm,
                        metric,
                        value,
                        status,
                    })
                };
                let Ok(x) = algorithm.run(&inst, algo_seed) else {
                    for m in Metric::ALL {
                        push(&mut out, m, None, Status::Failed);
                    }
                    continue;
                };
                for (metric, criterion) in [
                    (Metric::CoreViolation, Criterion::Core),
                    (Metric::FjrViolation, Criterion::Fjr),
                ] {
                    let (value, status) = audit_cell(&inst, &x, criterion, cfg.audit_mode)?;
                    push(&mut out, metric, value, status);
                }
                let obj = objectives(&inst, &x)?;
                push(
                    &mut out,
                    Metric::KmeansObj,
                    Some(obj.kmeans_obj),
                    Status::Ok,
                );
                push(
                    &mut out,
                    Metric::KmedoidsObj,
                    Some(obj.kmedoids_obj),
                    Status::Ok,
                );
                push(
                    &mut out,
                    Metric::AvgWithin,
                    Some(obj.avg_within),
                    Status::Ok,
                );
            }
        }
    }
    Ok(out)
}

fn audit_cell(
    inst: &Instance,
    x: &Clustering,
    criterion: Criterion,
    mode: AuditMode,
) -> Result<(Option<f64>, Status)> {
    let model = LossModel::native(inst);
    let opts = AuditOptions::default();
    match mode {
        AuditMode::Brute => {
            match bruteforce_violation_with_budget(inst, &model, x, criterion, opts.brute_budget) {
                Ok(r) => Ok((Some(r.violation), Status::Ok)),
                Err(semicentroid::Error::BudgetExceeded { .. }) => {
                    Ok((None, Status::AuditBudgetExceeded))
                }
                Err(e) => Err(e.into()),
            }
        }
        AuditMode::Exact => {
            let r = exact_violation_with_options(inst, &model, x, criterion, opts)?;
            let status = if r.lower_bound {
                Status::LowerBound
            } else {
                Status::Ok
            };
            Ok((Some(r.violation), status))
        }
    }
}
