//! Euclidean k-nearest-neighbour vote.
//!
//! Every training point whose distance equals the k-th smallest distance
//! takes part in the vote, so the neighbourhood can exceed `k` points. Vote
//! ties go to the smaller class index.

use crate::data::LabeledDataset;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct KnnModel<T> {
    points: Vec<T>,
    labels: Vec<usize>,
    dim: usize,
    n_classes: usize,
    k: usize,
}

impl<T: Scalar> KnnModel<T> {
    pub(crate) fn fit(train: &LabeledDataset<T>, neighbors: usize) -> Self {
        Self {
            points: train.values().to_vec(),
            labels: train.labels().to_vec(),
            dim: train.n_features(),
            n_classes: train.n_classes(),
            k: neighbors.min(train.n_samples()),
        }
    }

    /// Effective neighbourhood size, `min(neighbors, n_train)`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub(crate) fn predict(&self, x: &[T]) -> usize {
        let mut dist: Vec<T> = self
            .points
            .chunks_exact(self.dim)
            .map(|p| {
                p.iter()
                    .zip(x)
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .fold(T::zero(), |s, v| s + v)
            })
            .collect();
        let radius = {
            let mut scratch = dist.clone();
            let (_, kth, _) = scratch
                .select_nth_unstable_by(self.k - 1, |a, b| a.partial_cmp(b).expect("finite"));
            *kth
        };
        let mut votes = vec![0usize; self.n_classes];
        for (d, &y) in dist.drain(..).zip(&self.labels) {
            if d <= radius {
                votes[y] += 1;
            }
        }
        argmax_first(&votes)
    }
}

/// Index of the largest count; the first one on ties.
pub(crate) fn argmax_first(votes: &[usize]) -> usize {
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    best
}
