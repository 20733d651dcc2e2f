//! The classifier family: KNN, LDA, QDA, RBF-SVM and L1-logistic regression.
//!
//! [`fit`] turns a [`ClassifierSpec`] and a training set into an immutable
//! [`TrainedModel`]. Multi-class SVM and logistic models are one-vs-rest
//! ensembles whose ties go to the larger decision value, then the smaller
//! class index. Classes missing from the training rows are never predicted.

mod discriminant;
mod knn;
mod logistic;
mod risk;
mod spec;
mod svm;

pub use discriminant::DiscriminantModel;
pub use knn::KnnModel;
pub use logistic::LogisticMachine;
pub use risk::RiskEstimate;
pub use spec::{ClassifierSpec, Gamma, Lambda};
pub use svm::SvmMachine;

use crate::data::{stratified_kfold, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use discriminant::argmax_scores;
use logistic::{BinaryProblem, CdParams};
use svm::SmoParams;

/// Binary machines combined over the classes present at fit time.
#[derive(Debug, Clone)]
pub struct OneVsRest<M> {
    classes: Vec<usize>,
    /// One machine for two classes (positive side = `classes[1]`),
    /// otherwise one per class.
    machines: Vec<M>,
}

impl<M> OneVsRest<M> {
    pub fn machines(&self) -> &[M] {
        &self.machines
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    fn predict_with<T: Scalar>(&self, decide: impl Fn(&M) -> T) -> usize {
        if self.classes.len() == 2 {
            return if decide(&self.machines[0]) > T::zero() {
                self.classes[1]
            } else {
                self.classes[0]
            };
        }
        let scores: Vec<T> = self.machines.iter().map(decide).collect();
        self.classes[argmax_scores(&scores)]
    }
}

#[derive(Debug, Clone)]
pub enum ModelKind<T> {
    /// Only one class was present in the training rows.
    Constant(usize),
    Knn(KnnModel<T>),
    Discriminant(DiscriminantModel<T>),
    Svm(OneVsRest<SvmMachine<T>>),
    Logistic {
        ensemble: OneVsRest<LogisticMachine<T>>,
        lambda: f64,
    },
}

/// A fitted predictor over `dim`-dimensional inputs.
#[derive(Debug, Clone)]
pub struct TrainedModel<T> {
    dim: usize,
    n_classes: usize,
    kind: ModelKind<T>,
    converged: bool,
}

impl<T: Scalar> TrainedModel<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn kind(&self) -> &ModelKind<T> {
        &self.kind
    }

    /// `false` when an iterative solver stopped at its iteration cap; the
    /// model then holds the last iterate.
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Penalty used by a logistic model.
    pub fn lambda(&self) -> Option<f64> {
        match &self.kind {
            ModelKind::Logistic { lambda, .. } => Some(*lambda),
            _ => None,
        }
    }

    pub fn predict(&self, x: &[T]) -> Result<usize> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    fn predict_unchecked(&self, x: &[T]) -> usize {
        match &self.kind {
            ModelKind::Constant(c) => *c,
            ModelKind::Knn(m) => m.predict(x),
            ModelKind::Discriminant(m) => m.predict(x),
            ModelKind::Svm(e) => e.predict_with(|m| m.decision(x)),
            ModelKind::Logistic { ensemble, .. } => ensemble.predict_with(|m| m.decision(x)),
        }
    }

    /// Predictions for every row of `ds`.
    pub fn predict_all(&self, ds: &LabeledDataset<T>) -> Result<Vec<usize>> {
        if ds.n_features() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: ds.n_features(),
            });
        }
        Ok(ds.rows().map(|r| self.predict_unchecked(r)).collect())
    }
}

/// Fraction of `eval` rows the model gets wrong.
pub fn misclassification_rate<T: Scalar>(
    model: &TrainedModel<T>,
    eval: &LabeledDataset<T>,
) -> Result<RiskEstimate> {
    let predicted = model.predict_all(eval)?;
    let errors = predicted
        .iter()
        .zip(eval.labels())
        .filter(|(p, y)| p != y)
        .count();
    Ok(RiskEstimate::new(errors, eval.n_samples()))
}

/// Fits `spec` on `train`.
pub fn fit<T: Scalar>(spec: &ClassifierSpec, train: &LabeledDataset<T>) -> Result<TrainedModel<T>> {
    spec.validate()?;
    let dim = train.n_features();
    let n_classes = train.n_classes();
    let counts = train.class_counts();
    let present: Vec<usize> = (0..n_classes).filter(|&c| counts[c] > 0).collect();
    let model = |kind, converged| TrainedModel {
        dim,
        n_classes,
        kind,
        converged,
    };

    if let ClassifierSpec::Qda { .. } = spec {
        if let Some(c) = present.iter().find(|&&c| counts[c] < 2) {
            return Err(Error::Precondition(format!(
                "QDA needs at least 2 samples per class; class {c} has {}",
                counts[*c]
            )));
        }
    }
    if present.len() == 1 {
        return Ok(model(ModelKind::Constant(present[0]), true));
    }

    match spec {
        ClassifierSpec::Knn { neighbors } => {
            Ok(model(ModelKind::Knn(KnnModel::fit(train, *neighbors)), true))
        }
        ClassifierSpec::Lda { ridge } => Ok(model(
            ModelKind::Discriminant(DiscriminantModel::fit(train, *ridge, true)?),
            true,
        )),
        ClassifierSpec::Qda { ridge } => Ok(model(
            ModelKind::Discriminant(DiscriminantModel::fit(train, *ridge, false)?),
            true,
        )),
        ClassifierSpec::SvmRbf {
            cost,
            gamma,
            tol,
            max_passes,
        } => {
            let params = SmoParams {
                cost: T::of(*cost),
                gamma: T::of(match gamma {
                    Gamma::Auto => 1.0 / dim as f64,
                    Gamma::Fixed(g) => *g,
                }),
                tol: T::of(*tol),
                max_iter: max_passes.unwrap_or(10 * train.n_samples()),
            };
            let mut all_converged = true;
            let ensemble = one_vs_rest(train, &present, |positive| {
                let y: Vec<i8> = positive.iter().map(|&p| if p { 1 } else { -1 }).collect();
                let (m, ok) = SvmMachine::train(train.values(), dim, &y, params);
                all_converged &= ok;
                m
            });
            Ok(model(ModelKind::Svm(ensemble), all_converged))
        }
        ClassifierSpec::LogRegL1 {
            lambda,
            lambda_grid,
            inner_folds,
            max_iter,
            tol,
            cv_seed,
        } => {
            let chosen = match lambda {
                Lambda::Fixed(l) => *l,
                Lambda::Cv => {
                    if let Some(c) = present.iter().find(|&&c| counts[c] < *inner_folds) {
                        return Err(Error::Precondition(format!(
                            "class {c} has {} samples, fewer than {inner_folds} inner folds",
                            counts[*c]
                        )));
                    }
                    let grid = if lambda_grid.is_empty() {
                        default_lambda_grid(train)
                    } else {
                        lambda_grid.clone()
                    };
                    cv_select_lambda_with(train, &grid, *inner_folds, *cv_seed, *max_iter, *tol)?
                }
            };
            let (ensemble, converged) = fit_logistic(train, &present, chosen, *max_iter, *tol);
            Ok(model(
                ModelKind::Logistic {
                    ensemble,
                    lambda: chosen,
                },
                converged,
            ))
        }
    }
}

fn one_vs_rest<T: Scalar, M>(
    train: &LabeledDataset<T>,
    present: &[usize],
    mut train_one: impl FnMut(&[bool]) -> M,
) -> OneVsRest<M> {
    let labels = train.labels();
    let machines = if present.len() == 2 {
        let positive: Vec<bool> = labels.iter().map(|&y| y == present[1]).collect();
        vec![train_one(&positive)]
    } else {
        present
            .iter()
            .map(|&c| {
                let positive: Vec<bool> = labels.iter().map(|&y| y == c).collect();
                train_one(&positive)
            })
            .collect()
    };
    OneVsRest {
        classes: present.to_vec(),
        machines,
    }
}

fn binary_problems<T: Scalar>(train: &LabeledDataset<T>, present: &[usize]) -> OneVsRest<BinaryProblem<T>> {
    one_vs_rest(train, present, |positive| {
        BinaryProblem::new(train.values(), train.n_features(), positive)
    })
}

/// Fits a logistic ensemble along `path` (descending), warm-starting each
/// penalty from the previous solution. Returns one ensemble per penalty.
fn logistic_path<T: Scalar>(
    problems: &OneVsRest<BinaryProblem<T>>,
    path: &[f64],
    max_iter: usize,
    tol: f64,
) -> Vec<(OneVsRest<LogisticMachine<T>>, bool)> {
    let mut current: Vec<LogisticMachine<T>> =
        problems.machines.iter().map(BinaryProblem::null_machine).collect();
    path.iter()
        .map(|&lambda| {
            let params = CdParams {
                lambda: T::of(lambda),
                tol: T::of(tol),
                max_iter,
            };
            let mut ok = true;
            current = problems
                .machines
                .iter()
                .zip(current.drain(..))
                .map(|(p, start)| {
                    let (m, conv) = p.solve(start, params);
                    ok &= conv;
                    m
                })
                .collect();
            (
                OneVsRest {
                    classes: problems.classes.clone(),
                    machines: current.clone(),
                },
                ok,
            )
        })
        .collect()
}

fn fit_logistic<T: Scalar>(
    train: &LabeledDataset<T>,
    present: &[usize],
    lambda: f64,
    max_iter: usize,
    tol: f64,
) -> (OneVsRest<LogisticMachine<T>>, bool) {
    let problems = binary_problems(train, present);
    logistic_path(&problems, &[lambda], max_iter, tol)
        .pop()
        .expect("one penalty")
}

/// Smallest penalty whose solution has all weights zero, over the
/// one-vs-rest problems of `train`.
pub fn lambda_max<T: Scalar>(train: &LabeledDataset<T>) -> f64 {
    let counts = train.class_counts();
    let present: Vec<usize> = (0..train.n_classes()).filter(|&c| counts[c] > 0).collect();
    binary_problems(train, &present)
        .machines
        .iter()
        .map(|p| p.lambda_max().as_f64())
        .fold(0.0, f64::max)
}

/// 20 penalties log-spaced from `λ_max` down to `λ_max · 1e-4`.
pub fn default_lambda_grid<T: Scalar>(train: &LabeledDataset<T>) -> Vec<f64> {
    let top = lambda_max(train).max(f64::MIN_POSITIVE);
    (0..20)
        .map(|i| top * 10f64.powf(-4.0 * i as f64 / 19.0))
        .collect()
}

/// Chooses the penalty from `grid` (strictly descending) with the fewest
/// pooled cross-validation errors; ties go to the larger penalty.
pub fn cv_select_lambda<T: Scalar>(
    train: &LabeledDataset<T>,
    grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<f64> {
    cv_select_lambda_with(train, grid, folds, seed, 1000, 1e-7)
}

fn cv_select_lambda_with<T: Scalar>(
    train: &LabeledDataset<T>,
    grid: &[f64],
    folds: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidHyperparameter("empty lambda grid".into()));
    }
    if grid.windows(2).any(|w| w[0] <= w[1]) || grid.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidHyperparameter(
            "lambda grid must be positive and strictly descending".into(),
        ));
    }
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    let assignment = stratified_kfold(train, folds, seed)?;
    let counts = train.class_counts();
    let mut errors = vec![0usize; grid.len()];
    for fold in 0..folds {
        let (train_rows, test_rows) = assignment.split(fold);
        let part = train.select_rows(&train_rows);
        let part_counts = part.class_counts();
        if let Some(c) = (0..counts.len()).find(|&c| counts[c] > 0 && part_counts[c] == 0) {
            return Err(Error::ClassAbsentFromFold { class: c });
        }
        let held = train.select_rows(&test_rows);
        let present: Vec<usize> = (0..counts.len()).filter(|&c| counts[c] > 0).collect();
        let problems = binary_problems(&part, &present);
        for (slot, (ensemble, _)) in logistic_path(&problems, grid, max_iter, tol).into_iter().enumerate() {
            errors[slot] += held
                .rows()
                .zip(held.labels())
                .filter(|(x, &y)| ensemble.predict_with(|m| m.decision(x)) != y)
                .count();
        }
    }
    let mut best = 0;
    for (i, &e) in errors.iter().enumerate() {
        if e < errors[best] {
            best = i;
        }
    }
    Ok(grid[best])
}

/// Diagnostics for the logistic machines of a fitted model on its
/// training data: the largest optimality violation over all machines.
pub fn logistic_kkt_violation<T: Scalar>(
    model: &TrainedModel<T>,
    train: &LabeledDataset<T>,
) -> Option<f64> {
    let ModelKind::Logistic { ensemble, lambda } = &model.kind else {
        return None;
    };
    let problems = binary_problems(train, &ensemble.classes);
    Some(
        problems
            .machines
            .iter()
            .zip(&ensemble.machines)
            .map(|(p, m)| p.kkt_violation(m, T::of(*lambda)).as_f64())
            .fold(0.0, f64::max),
    )
}

/// Gradient of the mean negative log-likelihood of each logistic machine
/// at its fitted weights, as `(intercept, weights)` pairs.
pub fn logistic_gradients<T: Scalar>(
    model: &TrainedModel<T>,
    train: &LabeledDataset<T>,
) -> Option<Vec<(f64, Vec<f64>)>> {
    let ModelKind::Logistic { ensemble, .. } = &model.kind else {
        return None;
    };
    let problems = binary_problems(train, &ensemble.classes);
    Some(
        problems
            .machines
            .iter()
            .zip(&ensemble.machines)
            .map(|(p, m)| {
                let (g0, gw) = p.gradient(m);
                (g0.as_f64(), gw.into_iter().map(Scalar::as_f64).collect())
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests;
