use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::experiment::{Algorithm, AuditMode};
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "semicentroid",
    version,
    about = "Core- and FJR-fair clustering with semi-centroid losses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one algorithm on one dataset and print the clustering with losses.
    Cluster(ClusterArgs),
    /// Audit a clustering file for core or FJR violations.
    Audit(AuditArgs),
    /// Certify the lower-bound instances by exhaustive enumeration.
    Verify(VerifyArgs),
    /// Run a sampling experiment and emit long and aggregated tables.
    Experiment(ExperimentArgs),
    /// Check a long-format report against the algorithms' guarantees.
    Lint(LintArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Numeric columns to use (comma separated); default infers from the data.
    #[arg(long, value_delimiter = ',')]
    pub numeric: Vec<String>,
    /// Categorical columns to one-hot encode (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub algorithm: Algorithm,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub k: usize,
    /// Cluster a seeded sample of this many rows instead of all rows.
    #[arg(long)]
    pub sample_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Core,
    Fjr,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Weighted,
    #[value(name = "centroid-only")]
    CentroidOnly,
    #[value(name = "noncentroid-only")]
    NoncentroidOnly,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// JSON `{clusters: [{members, center}], agents?: [rows]}`.
    #[arg(long)]
    pub clustering: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = CriterionArg::Both)]
    pub criterion: CriterionArg,
    #[arg(long, value_enum, default_value_t = LossArg::Weighted)]
    pub loss: LossArg,
    #[arg(long, value_enum, default_value_t = AuditMode::Brute)]
    pub audit_mode: AuditMode,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Theorems to certify; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub theorem: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 100.0])]
    pub p_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
    pub lambda_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5])]
    pub balanced_lambda_grid: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config; flags given alongside override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub numeric: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub categorical: Option<Vec<String>>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub algorithms: Option<Vec<Algorithm>>,
    #[arg(long, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub k_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub sample_size: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub audit_mode: Option<AuditMode>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Directory for the report files; the aggregate table goes to stdout
    /// when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LintArgs {
    /// `long.csv` or `report.json` from `experiment`.
    #[arg(long)]
    pub report: PathBuf,
}
