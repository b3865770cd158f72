//! CSV ingestion into Euclidean instances.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use semicentroid::{DistanceMatrix, Instance};

use crate::error::{CliError, Result};

/// Which columns to use. With both lists empty every column is used and a
/// column is numeric iff all its values parse as numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    pub numeric: Vec<String>,
    pub categorical: Vec<String>,
}

/// Feature matrix after one-hot encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Encoded feature names; one-hot columns are `column=value`.
    pub features: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn ingest_csv(path: &Path, schema: &Schema) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(CliError::io(path))?;
    ingest_reader(file, schema)
}

pub fn ingest_reader(reader: impl Read, schema: &Schema) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(CliError::MalformedCsv {
            line: Some(1),
            message: "missing header".into(),
        });
    }
    let mut cells: Vec<Vec<String>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        cells.push(record.iter().map(|c| c.trim().to_string()).collect());
    }
    if cells.is_empty() {
        return Err(CliError::MalformedCsv {
            line: None,
            message: "no data rows".into(),
        });
    }

    let position = |name: &String| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::UnknownColumn(name.clone()))
    };
    let mut columns: Vec<(usize, bool)> = Vec::new();
    if schema.numeric.is_empty() && schema.categorical.is_empty() {
        for c in 0..header.len() {
            let numeric = cells
                .iter()
                .all(|r| r[c].parse::<f64>().is_ok_and(f64::is_finite));
            columns.push((c, numeric));
        }
    } else {
        for name in &schema.numeric {
            columns.push((position(name)?, true));
        }
        for name in &schema.categorical {
            columns.push((position(name)?, false));
        }
        columns.sort_unstable();
    }

    let mut features = Vec::new();
    let mut rows = vec![Vec::new(); cells.len()];
    for (c, numeric) in columns {
        if numeric {
            features.push(header[c].clone());
            for (r, row) in cells.iter().enumerate() {
                let v = row[c]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::NonNumericValue {
                        column: header[c].clone(),
                        row: r,
                        value: row[c].clone(),
                    })?;
                rows[r].push(v);
            }
        } else {
            let levels: BTreeSet<&str> = cells.iter().map(|r| r[c].as_str()).collect();
            for level in &levels {
                features.push(format!("{}={level}", header[c]));
            }
            for (r, row) in cells.iter().enumerate() {
                rows[r].extend(levels.iter().map(|&l| if l == row[c] { 1.0 } else { 0.0 }));
            }
        }
    }
    Ok(Dataset { features, rows })
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Weighted instance over the selected rows with Euclidean distances;
    /// every agent is a feasible center.
    pub fn instance(&self, rows: &[usize], k: usize, lambda: f64) -> Result<Instance> {
        let pts: Vec<Vec<f64>> = rows
            .iter()
            .map(|&r| {
                self.rows.get(r).cloned().ok_or_else(|| {
                    CliError::InvalidConfig(format!("row {r} out of range for {} rows", self.len()))
                })
            })
            .collect::<Result<_>>()?;
        let d = DistanceMatrix::euclidean(&pts);
        Ok(Instance::weighted_agents_as_centers(d, k, lambda)?.with_coordinates(pts)?)
    }
}
