use itertools::Itertools;
use rayon::prelude::*;

use crate::bounds::binomial;
use crate::classifiers::RiskEstimate;
use crate::data::{FeatureSubset, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::search::beam::rank;
use crate::search::evaluator::{Evaluator, SubsetScorer};

pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 1_000_000;

/// Scores every size-`d` subset and returns the best, ties to the
/// lexicographically first.
pub fn exhaustive_search<T: Scalar>(
    ds: &LabeledDataset<T>,
    evaluator: &Evaluator,
    d: usize,
    budget: u128,
) -> Result<(FeatureSubset, RiskEstimate)> {
    exhaustive_search_with(&evaluator.prepare(ds)?, d, budget)
}

pub fn exhaustive_search_with(
    scorer: &impl SubsetScorer,
    d: usize,
    budget: u128,
) -> Result<(FeatureSubset, RiskEstimate)> {
    let p = scorer.n_features();
    if d == 0 || d > p {
        return Err(Error::Precondition(format!("target size {d} outside 1..={p}")));
    }
    let needed = binomial(p as u64, d as u64);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let subsets: Vec<FeatureSubset> = (0..p)
        .combinations(d)
        .map(|c| FeatureSubset::new(c).expect("distinct"))
        .collect();
    let scored: Vec<Result<RiskEstimate>> = subsets.par_iter().map(|s| scorer.score(s)).collect();
    let mut first_error = None;
    let mut best: Option<(FeatureSubset, RiskEstimate)> = None;
    for (subset, result) in subsets.into_iter().zip(scored) {
        match result {
            Ok(score) => {
                let cand = (subset, score);
                if best.as_ref().is_none_or(|b| rank(&cand, b).is_lt()) {
                    best = Some(cand);
                }
            }
            Err(e) => {
                first_error.get_or_insert_with(|| format!("{subset}: {e}"));
            }
        }
    }
    best.ok_or_else(|| Error::SearchExhausted {
        step: d,
        reason: first_error.unwrap_or_else(|| "no candidates".into()),
    })
}
