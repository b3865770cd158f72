//! Long-format CSV written by an experiment reproduces its aggregates when
//! read back.

use std::path::PathBuf;

use semicentroid_cli::report::{aggregate, read_long_csv};
use semicentroid_cli::{emit_report, run_experiment, Algorithm, ExperimentConfig, Format};

fn config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/iris.csv"),
    );
    cfg.numeric = vec!["petal_length".into(), "petal_width".into()];
    cfg.algorithms = vec![Algorithm::Gc, Algorithm::Semiball, Algorithm::Kmedoids];
    cfg.lambda_grid = vec![0.3, 0.8];
    cfg.k_grid = vec![3];
    cfg.sample_size = 10;
    cfg.trials = 4;
    cfg.seed = 9;
    cfg
}

#[test]
fn csv_round_trip_reproduces_aggregates() {
    let table = run_experiment(&config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&table, Format::Csv, dir.path()).unwrap();
    assert_eq!(files.len(), 2);

    let long = read_long_csv(&dir.path().join("long.csv")).unwrap();
    assert_eq!(long, table.long);
    assert_eq!(aggregate(&long), table.aggregate);
}

#[test]
fn json_report_matches_csv() {
    let table = run_experiment(&config()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_report(&table, Format::Json, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let back = semicentroid_cli::report::parse_report_json(&text).unwrap();
    assert_eq!(back, table);
}

#[test]
fn same_seed_same_table() {
    assert_eq!(
        run_experiment(&config()).unwrap(),
        run_experiment(&config()).unwrap()
    );
}
