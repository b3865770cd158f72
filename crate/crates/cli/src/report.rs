//! Result tables: long format, per-cell aggregates, and their CSV/JSON
//! forms.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, Result};
use crate::experiment::Algorithm;

pub const SCHEMA_VERSION: u32 = 1;

/// z-score of a two-sided 95% normal interval.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[value(name = "core_violation")]
    CoreViolation,
    #[value(name = "fjr_violation")]
    FjrViolation,
    #[value(name = "kmeans_obj")]
    KmeansObj,
    #[value(name = "kmedoids_obj")]
    KmedoidsObj,
    #[value(name = "avg_within")]
    AvgWithin,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::CoreViolation,
        Metric::FjrViolation,
        Metric::KmeansObj,
        Metric::KmedoidsObj,
        Metric::AvgWithin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::CoreViolation => "core_violation",
            Metric::FjrViolation => "fjr_violation",
            Metric::KmeansObj => "kmeans_obj",
            Metric::KmedoidsObj => "kmedoids_obj",
            Metric::AvgWithin => "avg_within",
        }
    }
}

/// How a long-table value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// The exact audit ran out of search nodes; the value is a lower bound.
    LowerBound,
    /// Brute-force audit would exceed its budget; no value.
    AuditBudgetExceeded,
    /// The algorithm rejected the instance; no value.
    Failed,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::LowerBound => "lower_bound",
            Status::AuditBudgetExceeded => "audit_budget_exceeded",
            Status::Failed => "failed",
        }
    }
}

macro_rules! impl_names {
    ($t:ty, $all:expr) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                $all.into_iter()
                    .find(|v| v.name() == s)
                    .ok_or_else(|| format!("unknown {} {s:?}", stringify!($t)))
            }
        }
    };
}

impl_names!(Metric, Metric::ALL);
impl_names!(
    Status,
    [
        Status::Ok,
        Status::LowerBound,
        Status::AuditBudgetExceeded,
        Status::Failed
    ]
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRow {
    pub trial: usize,
    pub lambda: f64,
    pub k: usize,
    pub algorithm: Algorithm,
    pub metric: Metric,
    #[serde(with = "extended_opt")]
    pub value: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggRow {
    pub lambda: f64,
    pub k: usize,
    pub algorithm: Algorithm,
    pub metric: Metric,
    /// Values with status `ok`, the only ones aggregated.
    pub count: usize,
    /// Rows with any other status.
    pub flagged: usize,
    #[serde(with = "extended_opt")]
    pub mean: Option<f64>,
    #[serde(with = "extended_opt")]
    pub ci_low: Option<f64>,
    #[serde(with = "extended_opt")]
    pub ci_high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultTable {
    pub long: Vec<LongRow>,
    pub aggregate: Vec<AggRow>,
}

impl ResultTable {
    pub fn from_long(long: Vec<LongRow>) -> Self {
        let aggregate = aggregate(&long);
        Self { long, aggregate }
    }

    pub fn is_empty(&self) -> bool {
        self.long.is_empty()
    }

    pub fn cell(
        &self,
        lambda: f64,
        k: usize,
        algorithm: Algorithm,
        metric: Metric,
    ) -> Option<&AggRow> {
        self.aggregate.iter().find(|r| {
            r.lambda == lambda && r.k == k && r.algorithm == algorithm && r.metric == metric
        })
    }
}

/// Mean and normal 95% interval per `(λ, k, algorithm, metric)` cell, in
/// order of first appearance.
pub fn aggregate(long: &[LongRow]) -> Vec<AggRow> {
    type Key = (u64, usize, Algorithm, Metric);
    let mut order: Vec<Key> = Vec::new();
    let mut groups: std::collections::HashMap<Key, (Vec<f64>, usize)> = Default::default();
    for r in long {
        let key = (r.lambda.to_bits(), r.k, r.algorithm, r.metric);
        let g = groups.entry(key).or_insert_with(|| {
            order.push(key);
            (Vec::new(), 0)
        });
        match (r.status, r.value) {
            (Status::Ok, Some(v)) => g.0.push(v),
            _ => g.1 += 1,
        }
    }
    order
        .into_iter()
        .map(|key| {
            let (values, flagged) = &groups[&key];
            let (mean, ci_low, ci_high) = mean_ci(values);
            AggRow {
                lambda: f64::from_bits(key.0),
                k: key.1,
                algorithm: key.2,
                metric: key.3,
                count: values.len(),
                flagged: *flagged,
                mean,
                ci_low,
                ci_high,
            }
        })
        .collect()
}

fn mean_ci(values: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if !mean.is_finite() || n == 1 {
        return (Some(mean), Some(mean), Some(mean));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let half = Z95 * (var / n as f64).sqrt();
    (Some(mean), Some(mean - half), Some(mean + half))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::MalformedCsv {
        line: None,
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

const LONG_HEADER: [&str; 7] = [
    "trial",
    "lambda",
    "k",
    "algorithm",
    "metric",
    "value",
    "status",
];

pub fn long_csv(rows: &[LongRow]) -> Result<String> {
    csv_bytes(
        &LONG_HEADER,
        rows.iter().map(|r| {
            vec![
                r.trial.to_string(),
                r.lambda.to_string(),
                r.k.to_string(),
                r.algorithm.to_string(),
                r.metric.to_string(),
                fmt_opt(r.value),
                r.status.to_string(),
            ]
        }),
    )
}

pub fn aggregate_csv(rows: &[AggRow]) -> Result<String> {
    csv_bytes(
        &[
            "lambda",
            "k",
            "algorithm",
            "metric",
            "count",
            "flagged",
            "mean",
            "ci_low",
            "ci_high",
        ],
        rows.iter().map(|r| {
            vec![
                r.lambda.to_string(),
                r.k.to_string(),
                r.algorithm.to_string(),
                r.metric.to_string(),
                r.count.to_string(),
                r.flagged.to_string(),
                fmt_opt(r.mean),
                fmt_opt(r.ci_low),
                fmt_opt(r.ci_high),
            ]
        }),
    )
}

#[derive(Serialize, Deserialize)]
struct JsonReport {
    schema_version: u32,
    #[serde(flatten)]
    table: ResultTable,
}

pub fn report_json(table: &ResultTable) -> Result<String> {
    let doc = JsonReport {
        schema_version: SCHEMA_VERSION,
        table: table.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n")
}

pub fn parse_report_json(text: &str) -> Result<ResultTable> {
    let doc: JsonReport = serde_json::from_str(text).map_err(|e| CliError::MalformedCsv {
        line: Some(e.line() as u64),
        message: format!("bad JSON report: {e}"),
    })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(CliError::MalformedCsv {
            line: None,
            message: format!("unsupported schema version {}", doc.schema_version),
        });
    }
    Ok(doc.table)
}

/// Writes `long.csv` and `aggregate.csv`, or `report.json`, into `dir`.
pub fn emit_report(table: &ResultTable, format: Format, dir: &Path) -> Result<Vec<PathBuf>> {
    if table.is_empty() {
        return Err(CliError::NonemptyTableRequired);
    }
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let files = match format {
        Format::Csv => vec![
            ("long.csv", long_csv(&table.long)?),
            ("aggregate.csv", aggregate_csv(&table.aggregate)?),
        ],
        Format::Json => vec![("report.json", report_json(table)?)],
    };
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(CliError::io(&path))?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_long_csv(path: &Path) -> Result<Vec<LongRow>> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    parse_long_csv(&text)
}

pub fn parse_long_csv(text: &str) -> Result<Vec<LongRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != LONG_HEADER {
        return Err(CliError::MalformedCsv {
            line: Some(1),
            message: format!("expected header {}", LONG_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line());
        let bad = |what: &str| CliError::MalformedCsv {
            line,
            message: format!("bad {what}"),
        };
        let value = match &rec[5] {
            "" => None,
            v => Some(v.parse::<f64>().map_err(|_| bad("value"))?),
        };
        rows.push(LongRow {
            trial: rec[0].parse().map_err(|_| bad("trial"))?,
            lambda: rec[1].parse().map_err(|_| bad("lambda"))?,
            k: rec[2].parse().map_err(|_| bad("k"))?,
            algorithm: rec[3].parse().map_err(|_| bad("algorithm"))?,
            metric: rec[4].parse().map_err(|_| bad("metric"))?,
            value,
            status: rec[6].parse().map_err(|_| bad("status"))?,
        });
    }
    Ok(rows)
}

/// `None` as null, `+∞` as the string `"inf"`, anything else as a number.
mod extended_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            None => s.serialize_none(),
            Some(x) if *x == f64::INFINITY => s.serialize_str("inf"),
            Some(x) => s.serialize_f64(*x),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Num(v)) => Ok(Some(v)),
            Some(Repr::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
            Some(Repr::Text(t)) => Err(serde::de::Error::custom(format!("bad value {t:?}"))),
        }
    }
}
