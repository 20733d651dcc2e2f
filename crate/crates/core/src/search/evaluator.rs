use serde::{Deserialize, Serialize};

use crate::classifiers::{fit, misclassification_rate, ClassifierSpec, RiskEstimate};
use crate::data::{holdout_indices, stratified_kfold, FeatureSubset, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which rows fit a candidate model and which rows score it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scoring {
    /// Fit and score on the full data: the empirical risk itself.
    TrainResubstitution,
    /// Fit on the kept rows, score on a stratified held-out `fraction`.
    Holdout { fraction: f64, seed: u64 },
    /// Pooled errors of stratified K-fold cross-validation.
    InnerCv { folds: usize, seed: u64 },
}

impl Default for Scoring {
    fn default() -> Self {
        Scoring::InnerCv { folds: 5, seed: 0 }
    }
}

impl Scoring {
    /// The same scheme with its seed replaced by `seed`.
    pub fn reseeded(&self, seed: u64) -> Self {
        match self {
            Scoring::TrainResubstitution => Scoring::TrainResubstitution,
            Scoring::Holdout { fraction, .. } => Scoring::Holdout {
                fraction: *fraction,
                seed,
            },
            Scoring::InnerCv { folds, .. } => Scoring::InnerCv {
                folds: *folds,
                seed,
            },
        }
    }

    /// Model fits per scored candidate.
    pub fn fits_per_score(&self) -> usize {
        match self {
            Scoring::InnerCv { folds, .. } => *folds,
            _ => 1,
        }
    }
}

/// A classifier specification together with the scoring scheme used to rank
/// feature subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluator {
    pub spec: ClassifierSpec,
    pub scoring: Scoring,
}

impl Evaluator {
    pub fn new(spec: ClassifierSpec, scoring: Scoring) -> Self {
        Self { spec, scoring }
    }

    /// Resolves the row splits of the scoring scheme on `ds`.
    pub fn prepare<'a, T: Scalar>(&'a self, ds: &'a LabeledDataset<T>) -> Result<PreparedEvaluator<'a, T>> {
        let parts = match &self.scoring {
            Scoring::TrainResubstitution => vec![(ds.clone(), ds.clone())],
            Scoring::Holdout { fraction, seed } => {
                let (kept, held) = holdout_indices(ds.labels(), ds.n_classes(), *fraction, *seed)?;
                vec![(ds.select_rows(&kept), ds.select_rows(&held))]
            }
            Scoring::InnerCv { folds, seed } => {
                let assignment = stratified_kfold(ds, *folds, *seed)?;
                (0..*folds)
                    .map(|f| {
                        let (train, test) = assignment.split(f);
                        (ds.select_rows(&train), ds.select_rows(&test))
                    })
                    .collect()
            }
        };
        Ok(PreparedEvaluator {
            spec: &self.spec,
            parts,
            p: ds.n_features(),
        })
    }
}

/// Anything that assigns a misclassification score to a feature subset.
///
/// Implementations must be pure: the same subset always gets the same score.
pub trait SubsetScorer: Sync {
    fn n_features(&self) -> usize;
    fn score(&self, subset: &FeatureSubset) -> Result<RiskEstimate>;
}

/// An [`Evaluator`] bound to a dataset, with its splits computed once.
#[derive(Debug, Clone)]
pub struct PreparedEvaluator<'a, T> {
    spec: &'a ClassifierSpec,
    parts: Vec<(LabeledDataset<T>, LabeledDataset<T>)>,
    p: usize,
}

impl<T: Scalar> SubsetScorer for PreparedEvaluator<'_, T> {
    fn n_features(&self) -> usize {
        self.p
    }

    fn score(&self, subset: &FeatureSubset) -> Result<RiskEstimate> {
        if subset.max_index() >= self.p {
            return Err(Error::IndexOutOfRange {
                index: subset.max_index(),
                p: self.p,
            });
        }
        let mut total: Option<RiskEstimate> = None;
        for (train, eval) in &self.parts {
            let model = fit(self.spec, &train.project(subset)?)?;
            let risk = misclassification_rate(&model, &eval.project(subset)?)?;
            total = Some(match total {
                None => risk,
                Some(t) => t.pooled(risk),
            });
        }
        Ok(total.expect("at least one split"))
    }
}
