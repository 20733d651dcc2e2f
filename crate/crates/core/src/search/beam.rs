use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::classifiers::RiskEstimate;
use crate::data::{FeatureSubset, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::search::evaluator::{Evaluator, SubsetScorer};
use crate::search::trace::{BeamState, SearchTrace, StepRecord};

/// Result of a subset search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub subset: FeatureSubset,
    pub score: RiskEstimate,
    pub trace: SearchTrace,
}

pub(crate) fn rank(a: &(FeatureSubset, RiskEstimate), b: &(FeatureSubset, RiskEstimate)) -> Ordering {
    a.1.cmp_rate(&b.1).then_with(|| a.0.cmp(&b.0))
}

/// Beam search for a size-`d` subset with beam width `k`, scoring with
/// `evaluator` on `ds`.
pub fn beam_search<T: Scalar>(
    ds: &LabeledDataset<T>,
    evaluator: &Evaluator,
    d: usize,
    k: usize,
) -> Result<SearchOutcome> {
    beam_search_with(&evaluator.prepare(ds)?, d, k)
}

/// Forward selection: beam search with width 1.
pub fn forward_selection<T: Scalar>(
    ds: &LabeledDataset<T>,
    evaluator: &Evaluator,
    d: usize,
) -> Result<SearchOutcome> {
    beam_search(ds, evaluator, d, 1)
}

pub fn forward_selection_with(scorer: &impl SubsetScorer, d: usize) -> Result<SearchOutcome> {
    beam_search_with(scorer, d, 1)
}

/// Beam search over an arbitrary subset scorer.
pub fn beam_search_with(scorer: &impl SubsetScorer, d: usize, k: usize) -> Result<SearchOutcome> {
    let p = scorer.n_features();
    if d == 0 || d > p {
        return Err(Error::Precondition(format!("target size {d} outside 1..={p}")));
    }
    if k == 0 {
        return Err(Error::Precondition("beam width must be ≥ 1".into()));
    }

    let mut trace = SearchTrace::default();
    let mut beam: Vec<(FeatureSubset, RiskEstimate)> = Vec::new();
    for step in 1..=d {
        let (children, parents, generated) = if step == 1 {
            ((0..p).map(FeatureSubset::single).collect::<Vec<_>>(), 0, p)
        } else {
            let mut unique = BTreeSet::new();
            let mut generated = 0;
            for (parent, _) in &beam {
                for j in 0..p {
                    if let Some(child) = parent.with(j) {
                        generated += 1;
                        unique.insert(child);
                    }
                }
            }
            (unique.into_iter().collect(), beam.len(), generated)
        };
        let fitted = children.len();

        let scored: Vec<Result<RiskEstimate>> = children.par_iter().map(|c| scorer.score(c)).collect();
        let mut candidates = Vec::with_capacity(fitted);
        let mut failures = Vec::new();
        for (child, result) in children.into_iter().zip(scored) {
            match result {
                Ok(score) => candidates.push((child, score)),
                Err(e) => failures.push((child, e.to_string())),
            }
        }
        if candidates.is_empty() {
            let reason = failures
                .first()
                .map(|(s, e)| format!("{s}: {e}"))
                .unwrap_or_else(|| "no candidates".into());
            return Err(Error::SearchExhausted { step, reason });
        }
        candidates.sort_by(rank);
        candidates.truncate(k);
        beam = candidates;
        trace.steps.push(StepRecord {
            parents,
            generated,
            duplicates: generated - fitted,
            fitted,
            failures,
            beam: BeamState {
                step,
                candidates: beam.clone(),
            },
        });
    }

    let (subset, score) = beam.into_iter().next().expect("non-empty beam");
    Ok(SearchOutcome { subset, score, trace })
}
