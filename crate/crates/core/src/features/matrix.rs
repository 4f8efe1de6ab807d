//! The feature matrix and its CSV form.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::Label;

/// Instances x features, with optional labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<Option<Label>>,
}

/// Sensor part of a `<symbol>@<sensor>` column name.
pub fn sensor_of(column: &str) -> Option<&str> {
    column.rsplit_once('@').map(|(_, s)| s)
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Sensors referenced by the columns, in name order.
    pub fn sensors(&self) -> Vec<String> {
        self.columns
            .iter()
            .filter_map(|c| sensor_of(c))
            .map(str::to_string)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Labels, failing if any row is unlabeled.
    pub fn require_labels(&self) -> Result<Vec<Label>> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::Data(format!("row {i} is unlabeled"))))
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Keeps the named columns in the given order.
    pub fn select_columns(&self, names: &[String]) -> Result<FeatureMatrix> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.columns
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| Error::Schema(format!("matrix has no column {n}")))
            })
            .collect::<Result<_>>()?;
        Ok(FeatureMatrix {
            columns: names.to_vec(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
            labels: self.labels.clone(),
        })
    }

    /// Keeps only columns whose sensor is in `sensors`.
    pub fn restrict_to_sensors(&self, sensors: &[String]) -> Result<FeatureMatrix> {
        let keep: Vec<String> = self
            .columns
            .iter()
            .filter(|c| sensor_of(c).is_some_and(|s| sensors.iter().any(|k| k == s)))
            .cloned()
            .collect();
        self.select_columns(&keep)
    }

    /// Drops every column of `sensor`.
    pub fn without_sensor(&self, sensor: &str) -> Result<FeatureMatrix> {
        let keep: Vec<String> =
            self.columns.iter().filter(|c| sensor_of(c) != Some(sensor)).cloned().collect();
        self.select_columns(&keep)
    }

    pub fn subset_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            columns: self.columns.clone(),
            rows: rows.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Writes `<columns...>,label` with 17 significant digits per value.
    /// Unlabeled rows leave the label field empty.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "{},label", self.columns.join(",")).map_err(io)?;
        let mut line = String::new();
        for (row, label) in self.rows.iter().zip(&self.labels) {
            line.clear();
            for v in row {
                write!(line, "{v:.16e},").expect("write to string");
            }
            if let Some(l) = label {
                line.push_str(l.as_str());
            }
            writeln!(w, "{line}").map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(file);
        let mut records = reader.records();
        let header = match records.next() {
            Some(r) => r.map_err(|e| Error::parse(path, 1, e.to_string()))?,
            None => return Err(Error::parse(path, 1, "empty file, missing header")),
        };
        let mut columns: Vec<String> = header.iter().map(|s| s.trim().to_string()).collect();
        if columns.last().map(String::as_str) != Some("label") {
            return Err(Error::parse(path, 1, "last header column must be `label`"));
        }
        columns.pop();
        if let Some(bad) = columns.iter().find(|c| sensor_of(c).is_none()) {
            return Err(Error::parse(path, 1, format!("column {bad:?} lacks an @sensor suffix")));
        }
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (i, rec) in records.enumerate() {
            let line = i as u64 + 2;
            let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
            if rec.len() != columns.len() + 1 {
                return Err(Error::parse(
                    path,
                    line,
                    format!("expected {} columns, found {}", columns.len() + 1, rec.len()),
                ));
            }
            let mut row = Vec::with_capacity(columns.len());
            for (j, raw) in rec.iter().take(columns.len()).enumerate() {
                let v: f64 = raw.trim().parse().map_err(|_| {
                    Error::parse(path, line, format!("column {}: cannot parse {raw:?}", columns[j]))
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(path, line, format!("column {}: non-finite", columns[j])));
                }
                row.push(v);
            }
            let raw_label = rec[columns.len()].trim();
            labels.push(if raw_label.is_empty() {
                None
            } else {
                Some(raw_label.parse().map_err(|m: String| Error::parse(path, line, m))?)
            });
            rows.push(row);
        }
        Ok(FeatureMatrix { columns, rows, labels })
    }
}
