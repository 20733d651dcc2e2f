use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-empty set of column indices, kept sorted ascending.
///
/// The canonical ordering makes set equality plain sequence equality, and the
/// derived `Ord` is the lexicographic order used for tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FeatureSubset(Vec<usize>);

impl FeatureSubset {
    /// Builds a subset from indices in any order. Duplicates are rejected.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSubset("empty subset".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubset(format!("duplicate index in {indices:?}")));
        }
        Ok(Self(indices))
    }

    pub fn single(index: usize) -> Self {
        Self(vec![index])
    }

    /// All `p` columns.
    pub fn full(p: usize) -> Self {
        assert!(p > 0, "full subset of zero columns");
        Self((0..p).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    /// The subset extended by `index`, or `None` if it is already present.
    pub fn with(&self, index: usize) -> Option<Self> {
        match self.0.binary_search(&index) {
            Ok(_) => None,
            Err(pos) => {
                let mut v = Vec::with_capacity(self.0.len() + 1);
                v.extend_from_slice(&self.0[..pos]);
                v.push(index);
                v.extend_from_slice(&self.0[pos..]);
                Some(Self(v))
            }
        }
    }

    /// Largest index, used for range checks.
    pub fn max_index(&self) -> usize {
        *self.0.last().expect("non-empty")
    }

    /// Positions of `other`'s indices inside `self`, if `other ⊆ self`.
    pub fn positions_of(&self, other: &FeatureSubset) -> Option<FeatureSubset> {
        let pos = other
            .0
            .iter()
            .map(|i| self.0.binary_search(i).ok())
            .collect::<Option<Vec<_>>>()?;
        Some(Self(pos))
    }
}

impl TryFrom<Vec<usize>> for FeatureSubset {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FeatureSubset> for Vec<usize> {
    fn from(s: FeatureSubset) -> Self {
        s.0
    }
}

/// Formats as `{0,3,7}`.
impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{idx}")?;
        }
        write!(f, "}}")
    }
}

impl std::str::FromStr for FeatureSubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::InvalidSubset(format!("expected {{...}}, got {s:?}")))?;
        let indices = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidSubset(format!("bad index {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices)
    }
}
