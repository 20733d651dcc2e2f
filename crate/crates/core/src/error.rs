use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot read {path}: {reason}")]
    Io { path: PathBuf, reason: String },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: non-numeric feature value {value:?}")]
    NonNumeric {
        line: usize,
        column: usize,
        value: String,
    },

    #[error("line {line}, column {column}: non-finite feature value")]
    NonFinite { line: usize, column: usize },

    #[error("label column {0:?} not found")]
    MissingLabelColumn(String),

    #[error("dataset needs at least two classes, found {0}")]
    SingleClass(usize),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("feature index {index} out of range for {p} features")]
    IndexOutOfRange { index: usize, p: usize },

    #[error("invalid feature subset: {0}")]
    InvalidSubset(String),

    #[error("cannot build {folds} folds from {n} samples")]
    TooManyFolds { folds: usize, n: usize },

    #[error("split leaves class {class} empty in one part")]
    EmptySplit { class: usize },

    #[error("class {class} has no samples in a training fold")]
    ClassAbsentFromFold { class: usize },

    #[error("dimension mismatch: model expects {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Covariance still singular after the ridge; `None` for a pooled estimate.
    #[error("degenerate covariance{}", class.map(|c| format!(" for class {c}")).unwrap_or_default())]
    DegenerateCovariance { class: Option<usize> },

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search failed at step {step}: every candidate failed ({reason})")]
    SearchExhausted { step: usize, reason: String },

    #[error("budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed trace: {0}")]
    TraceFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
