//! End-to-end experiments: data, feature selection per model, test error,
//! aggregated into report tables.
//!
//! A simulation source regenerates a train/test pair per replication from
//! the seed `mix(master_seed, r)`. A CSV source is split into stratified
//! folds; each fold in turn is the test set and selection runs on the rest.

mod config;
mod report;
mod runner;

pub use config::{ExperimentConfig, OutputSpec, ReportFormat, Source, Strategy};
pub use report::{emit_report, render_csv, render_markdown, render_subsets, subsets_path, CellReport, ExperimentReport};
pub use runner::{estimate_fits, run_experiment};
