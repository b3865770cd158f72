//! Dataset ingestion, experiment orchestration and reporting for the
//! `semicentroid` command.

pub mod args;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod lint;
pub mod report;

pub use dataset::{ingest_csv, Dataset, Schema};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, Algorithm, AuditMode, ExperimentConfig};
pub use report::{emit_report, Format, ResultTable};
