//! Comma-separated ingestion and write-back.
//!
//! Dialect: `,` separator, optional header row, `.` decimal point, numeric
//! cells unquoted. Integer label columns map to classes by ascending value;
//! any other label column maps by first appearance.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl From<&str> for LabelColumn {
    fn from(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn map_labels(raw: &[&str]) -> Result<Vec<usize>> {
    let ints: Option<Vec<i64>> = raw.iter().map(|s| s.trim().parse().ok()).collect();
    let labels = match ints {
        Some(values) => {
            let mut distinct = values.clone();
            distinct.sort_unstable();
            distinct.dedup();
            values
                .iter()
                .map(|v| distinct.binary_search(v).expect("present"))
                .collect::<Vec<_>>()
        }
        None => {
            let mut ids: HashMap<&str, usize> = HashMap::new();
            raw.iter()
                .map(|s| {
                    let next = ids.len();
                    *ids.entry(s.trim()).or_insert(next)
                })
                .collect()
        }
    };
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    if classes < 2 {
        return Err(Error::SingleClass(classes));
    }
    Ok(labels)
}

/// Reads a labeled dataset from `path`.
pub fn load_csv<T: Scalar>(
    path: impl AsRef<Path>,
    label_column: &LabelColumn,
    has_header: bool,
) -> Result<LabeledDataset<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split(',').collect::<Vec<_>>()));

    let header = if has_header {
        Some(
            lines
                .next()
                .ok_or_else(|| Error::InvalidDataset("empty file".into()))?
                .1,
        )
    } else {
        None
    };
    let rows: Vec<(usize, Vec<&str>)> = lines.collect();
    let width = header
        .as_ref()
        .map(Vec::len)
        .or_else(|| rows.first().map(|r| r.1.len()))
        .ok_or_else(|| Error::InvalidDataset("no data rows".into()))?;
    if rows.is_empty() {
        return Err(Error::InvalidDataset("no data rows".into()));
    }

    let label_idx = match label_column {
        LabelColumn::Index(i) if *i < width => *i,
        LabelColumn::Index(i) => return Err(Error::MissingLabelColumn(i.to_string())),
        LabelColumn::Name(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|c| c.trim() == name))
            .ok_or_else(|| Error::MissingLabelColumn(name.clone()))?,
    };
    if width < 2 {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }

    let p = width - 1;
    let mut values = Vec::with_capacity(rows.len() * p);
    let mut raw_labels = Vec::with_capacity(rows.len());
    for (line, cells) in &rows {
        if cells.len() != width {
            return Err(Error::RaggedRow {
                line: *line,
                expected: width,
                found: cells.len(),
            });
        }
        for (column, cell) in cells.iter().enumerate() {
            if column == label_idx {
                raw_labels.push(*cell);
                continue;
            }
            let v: f64 = cell.trim().parse().map_err(|_| Error::NonNumeric {
                line: *line,
                column,
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    line: *line,
                    column,
                });
            }
            values.push(T::of(v));
        }
    }

    let labels = map_labels(&raw_labels)?;
    let ds = LabeledDataset::new(values, p, labels)?;
    match header {
        Some(h) => {
            let names = h
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != label_idx)
                .map(|(_, s)| s.trim().to_string())
                .collect();
            ds.with_feature_names(names)
        }
        None => Ok(ds),
    }
}

/// Writes `ds` with a header row and the label as the last column, named
/// `label`. Values carry 17 significant digits so they parse back exactly.
pub fn write_csv<T: Scalar>(ds: &LabeledDataset<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let names: Vec<String> = match ds.feature_names() {
        Some(n) => n.to_vec(),
        None => (0..ds.n_features()).map(|j| format!("x{j}")).collect(),
    };
    out.push_str(&names.join(","));
    out.push_str(",label\n");
    for (row, y) in ds.rows().zip(ds.labels()) {
        for v in row {
            out.push_str(&format!("{:.16e},", v.as_f64()));
        }
        out.push_str(&y.to_string());
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| io_err(path, e))
}
