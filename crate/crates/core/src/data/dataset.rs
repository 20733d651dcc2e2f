use crate::data::FeatureSubset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An `n × p` feature matrix (row-major) with one class index per row.
///
/// Datasets built through [`LabeledDataset::new`] or loaded from CSV contain
/// every class `0..n_classes` at least once. Row selections taken from a
/// larger dataset keep the parent's class count, so a small fold may lack a
/// class; the classifiers handle that by never predicting absent classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T> {
    values: Vec<T>,
    n: usize,
    p: usize,
    labels: Vec<usize>,
    n_classes: usize,
    feature_names: Option<Vec<String>>,
}

impl<T: Scalar> LabeledDataset<T> {
    /// Builds a dataset from row-major values, validating every invariant.
    pub fn new(values: Vec<T>, p: usize, labels: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || p == 0 {
            return Err(Error::InvalidDataset(format!("empty dataset ({n}×{p})")));
        }
        if values.len() != n * p {
            return Err(Error::InvalidDataset(format!(
                "{} values for {n} rows of {p} columns",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                line: pos / p,
                column: pos % p,
            });
        }
        let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
        let mut counts = vec![0usize; n_classes];
        for &y in &labels {
            counts[y] += 1;
        }
        if let Some(c) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidDataset(format!("class {c} has no samples")));
        }
        if n_classes < 2 {
            return Err(Error::SingleClass(n_classes));
        }
        Ok(Self {
            values,
            n,
            p,
            labels,
            n_classes,
            feature_names: None,
        })
    }

    /// Builds a dataset from a slice of rows.
    pub fn from_rows(rows: &[Vec<T>], labels: Vec<usize>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::RaggedRow {
                line: bad,
                expected: p,
                found: rows[bad].len(),
            });
        }
        Self::new(rows.concat(), p, labels)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p {
            return Err(Error::InvalidDataset(format!(
                "{} names for {} features",
                names.len(),
                self.p
            )));
        }
        self.feature_names = Some(names);
        Ok(self)
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.p
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.values.chunks_exact(self.p)
    }

    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[i * self.p + j]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Samples per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Restricts to the columns of `subset`, in ascending index order.
    pub fn project(&self, subset: &FeatureSubset) -> Result<Self> {
        if subset.max_index() >= self.p {
            return Err(Error::IndexOutOfRange {
                index: subset.max_index(),
                p: self.p,
            });
        }
        let idx = subset.indices();
        let d = idx.len();
        let mut values = Vec::with_capacity(self.n * d);
        for row in self.rows() {
            values.extend(idx.iter().map(|&j| row[j]));
        }
        let feature_names = self
            .feature_names
            .as_ref()
            .map(|names| idx.iter().map(|&j| names[j].clone()).collect());
        Ok(Self {
            values,
            n: self.n,
            p: d,
            labels: self.labels.clone(),
            n_classes: self.n_classes,
            feature_names,
        })
    }

    /// The rows at `indices`, in that order. The class count is inherited.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        assert!(!indices.is_empty(), "row selection must be non-empty");
        let mut values = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self {
            values,
            n: indices.len(),
            p: self.p,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            n_classes: self.n_classes,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Converts the scalar type, e.g. for running the same data in `f32`.
    pub fn cast<U: Scalar>(&self) -> LabeledDataset<U> {
        LabeledDataset {
            values: self.values.iter().map(|v| U::of(v.as_f64())).collect(),
            n: self.n,
            p: self.p,
            labels: self.labels.clone(),
            n_classes: self.n_classes,
            feature_names: self.feature_names.clone(),
        }
    }
}
