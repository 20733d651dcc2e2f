//! Gaussian discriminant analysis (LDA with a pooled covariance, QDA with
//! one covariance per class).
//!
//! Covariances are loaded on the diagonal with `ridge · trace(Σ)/d` before
//! factorization. Priors are the empirical class frequencies.

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, forward_solve, log_det_from_cholesky};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
struct ClassGaussian<T> {
    log_prior: T,
    mean: Vec<T>,
    /// Index into `DiscriminantModel::factors`.
    factor: usize,
}

#[derive(Debug, Clone)]
struct Factor<T> {
    chol: Vec<T>,
    log_det: T,
}

/// Fitted LDA or QDA model.
#[derive(Debug, Clone)]
pub struct DiscriminantModel<T> {
    dim: usize,
    /// `None` for classes absent from the training data.
    classes: Vec<Option<ClassGaussian<T>>>,
    factors: Vec<Factor<T>>,
    shared: bool,
}

fn scatter<T: Scalar>(rows: &[&[T]], mean: &[T], out: &mut [T]) {
    let d = mean.len();
    let mut centered = vec![T::zero(); d];
    for row in rows {
        for j in 0..d {
            centered[j] = row[j] - mean[j];
        }
        for i in 0..d {
            for j in 0..=i {
                out[i * d + j] = out[i * d + j] + centered[i] * centered[j];
            }
        }
    }
}

fn finish_covariance<T: Scalar>(
    mut s: Vec<T>,
    d: usize,
    dof: usize,
    ridge: f64,
    class: Option<usize>,
) -> Result<Factor<T>> {
    let denom = T::of_usize(dof);
    for i in 0..d {
        for j in 0..=i {
            let v = s[i * d + j] / denom;
            s[i * d + j] = v;
            s[j * d + i] = v;
        }
    }
    let trace: T = (0..d).map(|i| s[i * d + i]).sum();
    let load = T::of(ridge) * trace / T::of_usize(d);
    for i in 0..d {
        s[i * d + i] = s[i * d + i] + load;
    }
    let chol = cholesky(&s, d).ok_or(Error::DegenerateCovariance { class })?;
    let log_det = log_det_from_cholesky(&chol, d);
    Ok(Factor { chol, log_det })
}

impl<T: Scalar> DiscriminantModel<T> {
    pub(crate) fn fit(train: &LabeledDataset<T>, ridge: f64, shared: bool) -> Result<Self> {
        let d = train.n_features();
        let n = train.n_samples();
        let n_classes = train.n_classes();
        let mut members: Vec<Vec<&[T]>> = vec![Vec::new(); n_classes];
        for (row, &y) in train.rows().zip(train.labels()) {
            members[y].push(row);
        }
        let present = members.iter().filter(|m| !m.is_empty()).count();
        if !shared {
            if let Some(c) = members.iter().position(|m| m.len() == 1) {
                return Err(Error::Precondition(format!(
                    "QDA needs at least 2 samples per class; class {c} has 1"
                )));
            }
        } else if n <= present {
            return Err(Error::DegenerateCovariance { class: None });
        }

        let means: Vec<Vec<T>> = members
            .iter()
            .map(|rows| {
                let mut m = vec![T::zero(); d];
                for row in rows {
                    for j in 0..d {
                        m[j] = m[j] + row[j];
                    }
                }
                let count = T::of_usize(rows.len().max(1));
                m.iter_mut().for_each(|v| *v = *v / count);
                m
            })
            .collect();

        let mut factors = Vec::new();
        if shared {
            let mut s = vec![T::zero(); d * d];
            for (rows, mean) in members.iter().zip(&means) {
                scatter(rows, mean, &mut s);
            }
            factors.push(finish_covariance(s, d, n - present, ridge, None)?);
        }
        let mut classes = Vec::with_capacity(n_classes);
        for (c, (rows, mean)) in members.iter().zip(means).enumerate() {
            if rows.is_empty() {
                classes.push(None);
                continue;
            }
            let factor = if shared {
                0
            } else {
                let mut s = vec![T::zero(); d * d];
                scatter(rows, &mean, &mut s);
                factors.push(finish_covariance(s, d, rows.len() - 1, ridge, Some(c))?);
                factors.len() - 1
            };
            classes.push(Some(ClassGaussian {
                log_prior: (T::of_usize(rows.len()) / T::of_usize(n)).ln(),
                mean,
                factor,
            }));
        }
        Ok(Self {
            dim: d,
            classes,
            factors,
            shared,
        })
    }

    pub fn is_shared(&self) -> bool {
        self.shared
    }

    /// `ln π_c + ln N(x; μ_c, Σ_c)` per class, `−∞` for absent classes.
    pub fn log_discriminants(&self, x: &[T]) -> Vec<T> {
        let d = self.dim;
        let half = T::of(0.5);
        let log_2pi = T::of((2.0 * std::f64::consts::PI).ln());
        let mut z = vec![T::zero(); d];
        self.classes
            .iter()
            .map(|class| match class {
                None => T::neg_infinity(),
                Some(g) => {
                    let f = &self.factors[g.factor];
                    for j in 0..d {
                        z[j] = x[j] - g.mean[j];
                    }
                    forward_solve(&f.chol, d, &mut z);
                    let maha: T = z.iter().map(|&v| v * v).sum();
                    g.log_prior - half * (T::of_usize(d) * log_2pi + f.log_det + maha)
                }
            })
            .collect()
    }

    pub(crate) fn predict(&self, x: &[T]) -> usize {
        argmax_scores(&self.log_discriminants(x))
    }
}

/// First index of the maximum score.
pub(crate) fn argmax_scores<T: Scalar>(scores: &[T]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = c;
        }
    }
    best
}
