//! Labeled datasets, feature subsets, CSV ingestion and resampling.

mod csvio;
mod dataset;
mod folds;
mod subset;

pub use csvio::{load_csv, write_csv, LabelColumn};
pub use dataset::LabeledDataset;
pub use folds::{holdout_indices, split_holdout, stratified_kfold, FoldAssignment};
pub use subset::FeatureSubset;
