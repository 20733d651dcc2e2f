use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::scalar::Scalar;

/// Fold id for every sample of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    k: usize,
}

impl FoldAssignment {
    pub fn n_folds(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self) -> &[usize] {
        &self.fold_of
    }

    /// `(train_rows, test_rows)` for fold `fold`, both in sample order.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.fold_of.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Sample indices grouped by class, each group in sample order.
fn by_class(labels: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); n_classes];
    for (i, &y) in labels.iter().enumerate() {
        groups[y].push(i);
    }
    groups
}

/// Stratified K-fold assignment.
///
/// Each class is shuffled with a generator seeded by `seed`, then the
/// concatenation of the shuffled classes (in class order) is dealt
/// round-robin over folds `0, 1, …, K−1`. The deal continues across class
/// boundaries, so both the per-class and the overall fold sizes differ by at
/// most one.
pub fn stratified_kfold<T: Scalar>(
    ds: &LabeledDataset<T>,
    k: usize,
    seed: u64,
) -> Result<FoldAssignment> {
    stratified_kfold_labels(ds.labels(), ds.n_classes(), k, seed)
}

pub(crate) fn stratified_kfold_labels(
    labels: &[usize],
    n_classes: usize,
    k: usize,
    seed: u64,
) -> Result<FoldAssignment> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::Precondition(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::TooManyFolds { folds: k, n });
    }
    let mut rng = SimRng::new(seed);
    let mut fold_of = vec![0; n];
    let mut next = 0usize;
    for mut group in by_class(labels, n_classes) {
        rng.shuffle(&mut group);
        for i in group {
            fold_of[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldAssignment { fold_of, k })
}

/// Stratified holdout split as `(kept, held_out)` row indices.
///
/// Class `c` contributes `round(fraction · n_c)` rows to the held-out part.
pub fn holdout_indices(
    labels: &[usize],
    n_classes: usize,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Precondition(format!(
            "holdout fraction {fraction} outside (0, 1)"
        )));
    }
    let mut rng = SimRng::new(seed);
    let mut kept = Vec::new();
    let mut held = Vec::new();
    for (class, mut group) in by_class(labels, n_classes).into_iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        let take = (fraction * group.len() as f64).round() as usize;
        if take == 0 || take == group.len() {
            return Err(Error::EmptySplit { class });
        }
        rng.shuffle(&mut group);
        held.extend_from_slice(&group[..take]);
        kept.extend_from_slice(&group[take..]);
    }
    kept.sort_unstable();
    held.sort_unstable();
    Ok((kept, held))
}

/// Stratified split into `(kept, held_out)` datasets; see [`holdout_indices`].
pub fn split_holdout<T: Scalar>(
    ds: &LabeledDataset<T>,
    fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset<T>, LabeledDataset<T>)> {
    let (kept, held) = holdout_indices(ds.labels(), ds.n_classes(), fraction, seed)?;
    Ok((ds.select_rows(&kept), ds.select_rows(&held)))
}
