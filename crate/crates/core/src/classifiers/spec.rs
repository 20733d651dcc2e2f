use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// RBF kernel width: `auto` resolves to `1/d` at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NumberOrKeyword", into = "NumberOrKeyword")]
pub enum Gamma {
    Auto,
    Fixed(f64),
}

/// Logistic penalty strength: `cv` selects it by inner cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NumberOrKeyword", into = "NumberOrKeyword")]
pub enum Lambda {
    Cv,
    Fixed(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NumberOrKeyword {
    Number(f64),
    Keyword(String),
}

impl TryFrom<NumberOrKeyword> for Gamma {
    type Error = String;

    fn try_from(v: NumberOrKeyword) -> Result<Self, String> {
        match v {
            NumberOrKeyword::Number(x) => Ok(Gamma::Fixed(x)),
            NumberOrKeyword::Keyword(k) if k == "auto" => Ok(Gamma::Auto),
            NumberOrKeyword::Keyword(k) => Err(format!("gamma must be a number or \"auto\", got {k:?}")),
        }
    }
}

impl From<Gamma> for NumberOrKeyword {
    fn from(g: Gamma) -> Self {
        match g {
            Gamma::Auto => NumberOrKeyword::Keyword("auto".into()),
            Gamma::Fixed(x) => NumberOrKeyword::Number(x),
        }
    }
}

impl TryFrom<NumberOrKeyword> for Lambda {
    type Error = String;

    fn try_from(v: NumberOrKeyword) -> Result<Self, String> {
        match v {
            NumberOrKeyword::Number(x) => Ok(Lambda::Fixed(x)),
            NumberOrKeyword::Keyword(k) if k == "cv" => Ok(Lambda::Cv),
            NumberOrKeyword::Keyword(k) => Err(format!("lambda must be a number or \"cv\", got {k:?}")),
        }
    }
}

impl From<Lambda> for NumberOrKeyword {
    fn from(l: Lambda) -> Self {
        match l {
            Lambda::Cv => NumberOrKeyword::Keyword("cv".into()),
            Lambda::Fixed(x) => NumberOrKeyword::Number(x),
        }
    }
}

fn default_neighbors() -> usize {
    15
}
fn default_ridge() -> f64 {
    1e-6
}
fn default_cost() -> f64 {
    1.0
}
fn default_gamma() -> Gamma {
    Gamma::Auto
}
fn default_svm_tol() -> f64 {
    1e-3
}
fn default_lambda() -> Lambda {
    Lambda::Cv
}
fn default_inner_folds() -> usize {
    5
}
fn default_max_iter() -> usize {
    1000
}
fn default_logistic_tol() -> f64 {
    1e-7
}

/// Declarative classifier configuration.
///
/// Serialized with a `type` tag (`knn`, `lda`, `qda`, `svm_rbf`,
/// `log_reg_l1`); omitted fields take the defaults listed per variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassifierSpec {
    /// Euclidean k-nearest neighbours, majority vote. Default 15 neighbours.
    Knn {
        #[serde(default = "default_neighbors")]
        neighbors: usize,
    },
    /// Linear discriminant analysis; `ridge` scales the diagonal loading
    /// `ridge · trace(Σ)/d` of the pooled covariance.
    Lda {
        #[serde(default = "default_ridge")]
        ridge: f64,
    },
    /// Quadratic discriminant analysis with per-class covariances.
    Qda {
        #[serde(default = "default_ridge")]
        ridge: f64,
    },
    /// Soft-margin SVM with RBF kernel `exp(−γ‖x−y‖²)`, trained by SMO.
    /// `max_passes` caps SMO iterations; `None` means `10·n`.
    SvmRbf {
        #[serde(default = "default_cost")]
        cost: f64,
        #[serde(default = "default_gamma")]
        gamma: Gamma,
        #[serde(default = "default_svm_tol")]
        tol: f64,
        #[serde(default)]
        max_passes: Option<usize>,
    },
    /// L1-penalised logistic regression (one-vs-rest beyond two classes).
    /// An empty `lambda_grid` means 20 log-spaced values from the data's
    /// `λ_max` down to `λ_max·1e-4`.
    LogRegL1 {
        #[serde(default = "default_lambda")]
        lambda: Lambda,
        #[serde(default)]
        lambda_grid: Vec<f64>,
        #[serde(default = "default_inner_folds")]
        inner_folds: usize,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_logistic_tol")]
        tol: f64,
        #[serde(default)]
        cv_seed: u64,
    },
}

impl ClassifierSpec {
    pub fn knn() -> Self {
        ClassifierSpec::Knn {
            neighbors: default_neighbors(),
        }
    }

    pub fn lda() -> Self {
        ClassifierSpec::Lda {
            ridge: default_ridge(),
        }
    }

    pub fn qda() -> Self {
        ClassifierSpec::Qda {
            ridge: default_ridge(),
        }
    }

    pub fn svm() -> Self {
        ClassifierSpec::SvmRbf {
            cost: default_cost(),
            gamma: default_gamma(),
            tol: default_svm_tol(),
            max_passes: None,
        }
    }

    pub fn logistic() -> Self {
        ClassifierSpec::LogRegL1 {
            lambda: default_lambda(),
            lambda_grid: Vec::new(),
            inner_folds: default_inner_folds(),
            max_iter: default_max_iter(),
            tol: default_logistic_tol(),
            cv_seed: 0,
        }
    }

    /// Logistic regression at a fixed penalty.
    pub fn logistic_fixed(lambda: f64) -> Self {
        match Self::logistic() {
            ClassifierSpec::LogRegL1 {
                lambda_grid,
                inner_folds,
                max_iter,
                tol,
                cv_seed,
                ..
            } => ClassifierSpec::LogRegL1 {
                lambda: Lambda::Fixed(lambda),
                lambda_grid,
                inner_folds,
                max_iter,
                tol,
                cv_seed,
            },
            _ => unreachable!(),
        }
    }

    /// The five model families with their default hyperparameters.
    pub fn all_defaults() -> Vec<Self> {
        vec![
            Self::knn(),
            Self::lda(),
            Self::qda(),
            Self::svm(),
            Self::logistic(),
        ]
    }

    /// Short display name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierSpec::Knn { .. } => "KNN",
            ClassifierSpec::Lda { .. } => "LDA",
            ClassifierSpec::Qda { .. } => "QDA",
            ClassifierSpec::SvmRbf { .. } => "SVM",
            ClassifierSpec::LogRegL1 { .. } => "Logistic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidHyperparameter(msg));
        let positive = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                bad(format!("{name} must be positive and finite, got {v}"))
            }
        };
        match self {
            ClassifierSpec::Knn { neighbors } if *neighbors == 0 => bad("neighbors must be ≥ 1".into()),
            ClassifierSpec::Knn { .. } => Ok(()),
            ClassifierSpec::Lda { ridge } | ClassifierSpec::Qda { ridge } => {
                if *ridge >= 0.0 && ridge.is_finite() {
                    Ok(())
                } else {
                    bad(format!("ridge must be non-negative, got {ridge}"))
                }
            }
            ClassifierSpec::SvmRbf {
                cost,
                gamma,
                tol,
                max_passes,
            } => {
                positive("cost", *cost)?;
                positive("tol", *tol)?;
                if let Gamma::Fixed(g) = gamma {
                    positive("gamma", *g)?;
                }
                if *max_passes == Some(0) {
                    return bad("max_passes must be ≥ 1".into());
                }
                Ok(())
            }
            ClassifierSpec::LogRegL1 {
                lambda,
                lambda_grid,
                inner_folds,
                max_iter,
                tol,
                ..
            } => {
                if let Lambda::Fixed(l) = lambda {
                    positive("lambda", *l)?;
                }
                for &l in lambda_grid {
                    positive("lambda_grid entry", l)?;
                }
                if lambda_grid.windows(2).any(|w| w[0] <= w[1]) {
                    return bad("lambda_grid must be strictly descending".into());
                }
                if *lambda == Lambda::Cv && *inner_folds < 2 {
                    return bad("inner_folds must be ≥ 2".into());
                }
                if *max_iter == 0 {
                    return bad("max_iter must be ≥ 1".into());
                }
                positive("tol", *tol)
            }
        }
    }
}
