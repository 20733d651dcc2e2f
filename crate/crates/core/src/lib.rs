//! Wrapper feature selection for classification by beam search.
//!
//! The crate covers the whole experimental loop: labeled datasets and
//! resampling ([`data`]), five classifiers fitted from scratch
//! ([`classifiers`]), subset search by beam search, forward selection and
//! exhaustive enumeration ([`search`]), the three simulation settings
//! ([`simgen`]), VC-type risk bounds ([`bounds`]) and an experiment runner
//! that aggregates misclassification rates into report tables
//! ([`experiment`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod bounds;
pub mod classifiers;
pub mod data;
pub mod error;
pub mod experiment;
mod linalg;
pub mod rng;
pub mod scalar;
pub mod search;
pub mod simgen;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use classifiers::{ClassifierSpec, RiskEstimate};
pub use data::{FeatureSubset, LabelColumn};
pub use search::{BeamState, Evaluator, Scoring, SearchTrace};

/// Dataset with `f64` features.
pub type Dataset = data::LabeledDataset<f64>;
/// Fitted classifier over `f64` features.
pub type Model = classifiers::TrainedModel<f64>;
/// Train/test pair produced by the simulation generators, in `f64`.
pub type SimPair = simgen::SimPair<f64>;

/// Single-precision dataset.
pub type Dataset32 = data::LabeledDataset<f32>;
/// Single-precision fitted classifier.
pub type Model32 = classifiers::TrainedModel<f32>;
