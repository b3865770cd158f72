//! Subcommand bodies. Each returns the text to print and whether the run
//! counts as a success.

use std::path::Path;

use serde::{Deserialize, Serialize};

use semicentroid::audit::{bruteforce_violation, exact_violation};
use semicentroid::counterexamples::{verify_bound, CounterexampleSpec, Theorem};
use semicentroid::{
    validate_clustering, AuditReport, Cluster, Clustering, Criterion, Error, LossModel, LossTarget,
};

use crate::args::{
    AuditArgs, ClusterArgs, Command, CriterionArg, DataArgs, ExperimentArgs, LintArgs, LossArg,
    VerifyArgs,
};
use crate::dataset::{ingest_csv, Dataset, Schema};
use crate::error::{CliError, Result};
use crate::experiment::{run_experiment, sample_rows, trial_rng, AuditMode, ExperimentConfig};
use crate::lint::lint;
use crate::report::{
    aggregate_csv, emit_report, parse_report_json, read_long_csv, report_json, Format,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            success: true,
        }
    }
}

pub fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Cluster(a) => cluster(&a),
        Command::Audit(a) => audit(&a),
        Command::Verify(a) => verify(&a),
        Command::Experiment(a) => experiment(&a),
        Command::Lint(a) => lint_report(&a),
    }
}

fn load(data: &DataArgs) -> Result<Dataset> {
    ingest_csv(
        &data.dataset,
        &Schema {
            numeric: data.numeric.clone(),
            categorical: data.categorical.clone(),
        },
    )
}

/// Writes `text` to `out` when given; returns what should go to stdout.
fn deliver(text: String, out: Option<&Path>) -> Result<String> {
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(CliError::io(path))?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Clustering file contents. Member and center indices refer to positions
/// in `agents` when present, otherwise to dataset rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<Vec<usize>>,
    pub clusters: Vec<Cluster>,
}

#[derive(Debug, Serialize)]
struct ClusterOutput<'a> {
    algorithm: String,
    lambda: f64,
    k: usize,
    agents: &'a [usize],
    clusters: &'a [Cluster],
    losses: Vec<f64>,
}

fn cluster(a: &ClusterArgs) -> Result<Outcome> {
    let data = load(&a.data)?;
    let agents: Vec<usize> = match a.sample_size {
        Some(size) if size == 0 || size > data.len() => {
            return Err(CliError::InvalidInput(format!(
                "sample size {size} not in 1..={}",
                data.len()
            )));
        }
        Some(size) => sample_rows(&mut trial_rng(a.seed, 0), data.len(), size),
        None => (0..data.len()).collect(),
    };
    let inst = data.instance(&agents, a.k, a.lambda)?;
    let x = a.algorithm.run(&inst, a.seed)?;
    let model = LossModel::native(&inst);
    let losses = model.clustering_losses(&inst, &x)?;
    let text = match a.format {
        Format::Json => to_json(&ClusterOutput {
            algorithm: a.algorithm.to_string(),
            lambda: a.lambda,
            k: a.k,
            agents: &agents,
            clusters: &x.clusters,
            losses,
        }),
        Format::Csv => {
            let assignment = x.assignment(inst.n());
            let rows = (0..inst.n())
                .map(|i| {
                    let t = assignment[i];
                    vec![
                        i.to_string(),
                        agents[i].to_string(),
                        t.to_string(),
                        x.clusters[t].center.to_string(),
                        losses[i].to_string(),
                    ]
                })
                .collect();
            csv_text(&["agent", "row", "cluster", "center", "loss"], rows)?
        }
    };
    Ok(Outcome::ok(deliver(text, a.out.as_deref())?))
}

fn audit(a: &AuditArgs) -> Result<Outcome> {
    let data = load(&a.data)?;
    let path = &a.clustering;
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let file: ClusteringFile = serde_json::from_str(&text)
        .map_err(|e| CliError::InvalidInput(format!("{}: {e}", path.display())))?;
    let agents = file
        .agents
        .clone()
        .unwrap_or_else(|| (0..data.len()).collect());
    let inst = data.instance(&agents, a.k, a.lambda)?;
    let x = Clustering::new(file.clusters);
    validate_clustering(&inst, &x)?;
    let target = match a.loss {
        LossArg::Weighted => LossTarget::Weighted,
        LossArg::CentroidOnly => LossTarget::CentroidOnly,
        LossArg::NoncentroidOnly => LossTarget::NoncentroidOnly,
    };
    let model = LossModel::for_target(&inst, target)?;
    let criteria: &[Criterion] = match a.criterion {
        CriterionArg::Core => &[Criterion::Core],
        CriterionArg::Fjr => &[Criterion::Fjr],
        CriterionArg::Both => &[Criterion::Core, Criterion::Fjr],
    };
    let mut reports: Vec<AuditReport> = Vec::new();
    for &c in criteria {
        let r = match a.audit_mode {
            AuditMode::Brute => {
                bruteforce_violation(&inst, &model, &x, c).map_err(|e| match e {
                    Error::BudgetExceeded { .. } => {
                        CliError::InvalidInput(format!("{e}; rerun with --audit-mode exact"))
                    }
                    e => e.into(),
                })?
            }
            AuditMode::Exact => exact_violation(&inst, &model, &x, c)?,
        };
        reports.push(r);
    }
    let text = match a.format {
        Format::Json => to_json(&reports),
        Format::Csv => {
            let rows = reports
                .iter()
                .map(|r| {
                    let (members, center) = match &r.witness {
                        Some(w) => (
                            w.members
                                .iter()
                                .map(|m| m.to_string())
                                .collect::<Vec<_>>()
                                .join(" "),
                            w.center.to_string(),
                        ),
                        None => (String::new(), String::new()),
                    };
                    vec![
                        r.criterion.to_string(),
                        r.loss_target.to_string(),
                        r.violation.to_string(),
                        r.lower_bound.to_string(),
                        members,
                        center,
                    ]
                })
                .collect();
            csv_text(
                &[
                    "criterion",
                    "loss",
                    "violation",
                    "lower_bound",
                    "witness_members",
                    "witness_center",
                ],
                rows,
            )?
        }
    };
    Ok(Outcome::ok(deliver(text, a.out.as_deref())?))
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    theorem: String,
    p: Option<f64>,
    lambda: Option<f64>,
    threshold: f64,
    min_value: Option<f64>,
    clusterings: usize,
    passed: bool,
    detail: String,
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let theorems: Vec<Theorem> = if a.theorem.is_empty() || a.theorem.iter().any(|t| t == "all") {
        Theorem::ALL.to_vec()
    } else {
        a.theorem
            .iter()
            .map(|t| t.parse())
            .collect::<semicentroid::Result<_>>()?
    };
    let mut jobs: Vec<(Theorem, CounterexampleSpec, Option<f64>, Option<f64>)> = Vec::new();
    for t in theorems {
        match t {
            Theorem::BobwCore => {
                jobs.extend(
                    a.p_grid
                        .iter()
                        .map(|&p| (t, CounterexampleSpec::fig1(p), Some(p), None)),
                );
            }
            Theorem::FjrBobw => jobs.push((t, CounterexampleSpec::fjr_impossibility(), None, None)),
            Theorem::GLambda => jobs.extend(a.lambda_grid.iter().map(|&l| {
                let spec = CounterexampleSpec::g_lambda(l);
                (t, spec, Some(spec.p), Some(l))
            })),
            Theorem::CentroidRatio => jobs.extend(
                a.lambda_grid
                    .iter()
                    .map(|&l| (t, CounterexampleSpec::claim1_table(l), None, Some(l))),
            ),
            Theorem::BalancedSqrt => jobs.extend(a.balanced_lambda_grid.iter().map(|&l| {
                let spec = CounterexampleSpec::balanced_sqrt(l);
                (t, spec, Some(spec.p), Some(l))
            })),
        }
    }
    let mut rows = Vec::new();
    for (theorem, spec, p, lambda) in jobs {
        let row = match verify_bound(&spec, theorem) {
            Ok(c) => VerifyRow {
                theorem: theorem.to_string(),
                p,
                lambda,
                threshold: c.threshold,
                min_value: Some(c.min_value),
                clusterings: c.clusterings_checked,
                passed: true,
                detail: String::new(),
            },
            Err(Error::TheoremFalsified {
                value,
                threshold,
                clustering,
                ..
            }) => VerifyRow {
                theorem: theorem.to_string(),
                p,
                lambda,
                threshold,
                min_value: Some(value),
                clusterings: 0,
                passed: false,
                detail: format!("witness {:?}", clustering.canonical_partition()),
            },
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    let success = rows.iter().all(|r| r.passed);
    let text = match a.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.theorem.clone(),
                        opt(r.p),
                        opt(r.lambda),
                        r.threshold.to_string(),
                        opt(r.min_value),
                        r.clusterings.to_string(),
                        if r.passed { "PASS" } else { "FAIL" }.to_string(),
                        r.detail.clone(),
                    ]
                })
                .collect();
            csv_text(
                &[
                    "theorem",
                    "p",
                    "lambda",
                    "threshold",
                    "min_value",
                    "clusterings",
                    "result",
                    "detail",
                ],
                table,
            )?
        }
    };
    Ok(Outcome {
        text: deliver(text, a.out.as_deref())?,
        success,
    })
}

pub fn experiment_config(a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&a.config, &a.dataset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
            serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| CliError::InvalidConfig(format!("{}: {e}", path.display())))?
        }
        (None, Some(dataset)) => ExperimentConfig::new(dataset),
        (None, None) => return Err(CliError::InvalidConfig("give --config or --dataset".into())),
    };
    if let Some(v) = &a.dataset {
        cfg.dataset = v.clone();
    }
    if let Some(v) = &a.numeric {
        cfg.numeric = v.clone();
    }
    if let Some(v) = &a.categorical {
        cfg.categorical = v.clone();
    }
    if let Some(v) = &a.algorithms {
        cfg.algorithms = v.clone();
    }
    if let Some(v) = &a.lambda_grid {
        cfg.lambda_grid = v.clone();
    }
    if let Some(v) = &a.k_grid {
        cfg.k_grid = v.clone();
    }
    if let Some(v) = a.sample_size {
        cfg.sample_size = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.audit_mode {
        cfg.audit_mode = v;
    }
    if let Some(v) = &a.out {
        cfg.output = Some(v.clone());
    }
    Ok(cfg)
}

fn experiment(a: &ExperimentArgs) -> Result<Outcome> {
    let cfg = experiment_config(a)?;
    let table = run_experiment(&cfg)?;
    let text = match &cfg.output {
        Some(dir) => emit_report(&table, a.format, dir)?
            .iter()
            .map(|p| format!("wrote {}\n", p.display()))
            .collect(),
        None if table.is_empty() => return Err(CliError::NonemptyTableRequired),
        None => match a.format {
            Format::Csv => aggregate_csv(&table.aggregate)?,
            Format::Json => report_json(&table)?,
        },
    };
    Ok(Outcome::ok(text))
}

fn lint_report(a: &LintArgs) -> Result<Outcome> {
    let path = &a.report;
    let rows = if path.extension().is_some_and(|e| e == "json") {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        parse_report_json(&text)?.long
    } else {
        read_long_csv(path)?
    };
    let findings = lint(&rows);
    let mut text = String::new();
    for f in &findings {
        let r = &f.row;
        text.push_str(&format!(
            "trial {} lambda {} k {} {} {}: {} exceeds bound {}\n",
            r.trial,
            r.lambda,
            r.k,
            r.algorithm,
            r.metric,
            r.value.unwrap_or(f64::NAN),
            f.bound
        ));
    }
    text.push_str(&format!(
        "{} rows checked, {} above their guarantee\n",
        rows.len(),
        findings.len()
    ));
    Ok(Outcome {
        text,
        success: findings.is_empty(),
    })
}
