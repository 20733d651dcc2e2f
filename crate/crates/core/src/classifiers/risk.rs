use std::cmp::Ordering;
use std::fmt;

/// Misclassification count over an evaluation set.
///
/// The rate is the exact fraction `misclassified / n_evaluated`; comparisons
/// are by cross-multiplication, so equal fractions compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RiskEstimate {
    misclassified: usize,
    n_evaluated: usize,
}

impl RiskEstimate {
    pub fn new(misclassified: usize, n_evaluated: usize) -> Self {
        assert!(n_evaluated > 0, "risk over an empty evaluation set");
        assert!(misclassified <= n_evaluated);
        Self {
            misclassified,
            n_evaluated,
        }
    }

    pub fn misclassified(&self) -> usize {
        self.misclassified
    }

    pub fn n_evaluated(&self) -> usize {
        self.n_evaluated
    }

    pub fn rate(&self) -> f64 {
        self.misclassified as f64 / self.n_evaluated as f64
    }

    /// Pools two estimates over disjoint evaluation sets.
    pub fn pooled(self, other: RiskEstimate) -> Self {
        Self::new(
            self.misclassified + other.misclassified,
            self.n_evaluated + other.n_evaluated,
        )
    }

    fn cross(&self, other: &Self) -> (u128, u128) {
        (
            self.misclassified as u128 * other.n_evaluated as u128,
            other.misclassified as u128 * self.n_evaluated as u128,
        )
    }

    /// Compares the rates as exact fractions.
    pub fn cmp_rate(&self, other: &Self) -> Ordering {
        let (a, b) = self.cross(other);
        a.cmp(&b)
    }
}

/// Formats as `misclassified/n_evaluated`.
impl fmt::Display for RiskEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.misclassified, self.n_evaluated)
    }
}

impl std::str::FromStr for RiskEstimate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once('/').ok_or_else(|| format!("expected a/b, got {s:?}"))?;
        let a: usize = a.trim().parse().map_err(|_| format!("bad count {a:?}"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad count {b:?}"))?;
        if b == 0 || a > b {
            return Err(format!("invalid fraction {s:?}"));
        }
        Ok(Self::new(a, b))
    }
}
