//! VC-type guarantees for empirical risk minimisation over classifiers and
//! size-`d` feature subsets.
//!
//! With `N = 8·C(p,d)·S(𝓒,n)`, the deviation bound is
//! `P(sup |L̂ₙ − L| > ε/2) ≤ N·exp(−nε²/128)` and the expected excess risk is
//! at most `16·sqrt(ln(N·e) / (2n))`. Everything is evaluated in the log
//! domain, so huge `p` or `n` never overflow.
//!
//! [`empirical_excess_risk`] checks the bounds by Monte Carlo on a tiny
//! finite class (thresholds on the coordinate sum of a subset) where every
//! population risk has a closed form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{mix, SimRng};
use crate::simgen::normal_cdf;

/// Largest `min(d, p−d)` for which `ln C(p,d)` is summed term by term.
const SUMMATION_LIMIT: u64 = 100_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc·(n−i)/(i+1) is integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `ln C(p, d)`.
pub fn log_binomial(p: u64, d: u64) -> Result<f64> {
    if d > p {
        return Err(Error::Precondition(format!("subset size {d} exceeds {p} features")));
    }
    let k = d.min(p - d);
    let exact = binomial(p, k);
    if exact != u128::MAX {
        return Ok((exact as f64).ln());
    }
    if k <= SUMMATION_LIMIT {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for i in 0..k {
            let term = ((p - i) as f64).ln() - ((i + 1) as f64).ln() - comp;
            let next = sum + term;
            comp = (next - sum) - term;
            sum = next;
        }
        return Ok(sum);
    }
    use statrs::function::gamma::ln_gamma;
    Ok(ln_gamma(p as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((p - k) as f64 + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    n: u64,
    p: u64,
    d: u64,
    log_shatter: f64,
    epsilon: f64,
}

impl BoundInputs {
    /// `log_shatter` is `ln S(𝓒, n)`.
    pub fn new(n: u64, p: u64, d: u64, log_shatter: f64, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("sample size must be ≥ 1".into()));
        }
        if d == 0 || d > p {
            return Err(Error::Precondition(format!("need 0 < d ≤ p, got d={d} p={p}")));
        }
        if !(log_shatter >= 0.0) || !log_shatter.is_finite() {
            return Err(Error::Precondition(format!("log shatter coefficient must be finite and ≥ 0, got {log_shatter}")));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { n, p, d, log_shatter, epsilon })
    }

    /// Shatter coefficient from a VC dimension through Sauer's lemma,
    /// `S(𝓒, n) ≤ (n+1)^V`.
    pub fn with_vc_dimension(n: u64, p: u64, d: u64, vc_dim: u64, epsilon: f64) -> Result<Self> {
        Self::new(n, p, d, vc_dim as f64 * ((n as f64) + 1.0).ln(), epsilon)
    }

    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn log_shatter(&self) -> f64 {
        self.log_shatter
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `ln(8·C(p,d)·S(𝓒,n))`.
    pub fn log_union_size(&self) -> f64 {
        8f64.ln() + log_binomial(self.p, self.d).expect("validated") + self.log_shatter
    }
}

/// `min(1, 8·C(p,d)·S(𝓒,n)·exp(−nε²/128))`.
pub fn vc_probability_bound(b: &BoundInputs) -> f64 {
    let log_bound = b.log_union_size() - b.n as f64 * b.epsilon * b.epsilon / 128.0;
    if log_bound >= 0.0 {
        1.0
    } else {
        log_bound.exp()
    }
}

/// `16·sqrt(ln(8·C(p,d)·e·S(𝓒,n)) / (2n))`.
pub fn excess_risk_bound(b: &BoundInputs) -> f64 {
    16.0 * ((b.log_union_size() + 1.0) / (2.0 * b.n as f64)).sqrt()
}

/// Two equally likely classes, `N(mean0, I)` and `N(mean1, I)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinyGaussian {
    pub mean0: Vec<f64>,
    pub mean1: Vec<f64>,
}

impl TinyGaussian {
    pub fn p(&self) -> usize {
        self.mean0.len()
    }
}

/// Classifiers `x ↦ [s·(Σ_{j∈I} xⱼ − t) > 0]` for every threshold `t` in
/// the grid and, if `both_orientations`, both signs `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdClass {
    pub thresholds: Vec<f64>,
    pub both_orientations: bool,
}

impl ThresholdClass {
    /// `count` evenly spaced thresholds on `[lo, hi]`, both orientations.
    pub fn grid(lo: f64, hi: f64, count: usize) -> Self {
        let thresholds = match count {
            0 => Vec::new(),
            1 => vec![(lo + hi) / 2.0],
            _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
        };
        Self {
            thresholds,
            both_orientations: true,
        }
    }

    pub fn size(&self) -> usize {
        self.thresholds.len() * if self.both_orientations { 2 } else { 1 }
    }

    /// `ln |𝓒|`, an upper bound on the log shatter coefficient.
    pub fn log_size(&self) -> f64 {
        (self.size() as f64).ln()
    }

    fn members(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let signs: &[f64] = if self.both_orientations { &[1.0, -1.0] } else { &[1.0] };
        self.thresholds.iter().flat_map(move |&t| signs.iter().map(move |&s| (t, s)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcessRiskEstimate {
    pub mean: f64,
    /// Sample standard deviation over trials divided by `√trials`.
    pub se: f64,
    /// `L(ERM) − min L` for every trial.
    pub per_trial: Vec<f64>,
    /// Smallest population risk over the whole class.
    pub best_risk: f64,
}

impl ExcessRiskEstimate {
    /// Fraction of trials whose excess risk exceeds `epsilon`, with its
    /// binomial standard error.
    pub fn exceedance(&self, epsilon: f64) -> (f64, f64) {
        let t = self.per_trial.len() as f64;
        let freq = self.per_trial.iter().filter(|&&e| e > epsilon).count() as f64 / t;
        (freq, (freq * (1.0 - freq) / t).sqrt())
    }
}

/// Population risk of predicting class 1 when `s·(Σ xⱼ − t) > 0`, where the
/// class-`c` sum is `N(μ_c, d)`.
fn population_risk(mu0: f64, mu1: f64, sd: f64, t: f64, s: f64) -> f64 {
    // P(Σ > t | class c)
    let above0 = normal_cdf((mu0 - t) / sd);
    let above1 = normal_cdf((mu1 - t) / sd);
    if s > 0.0 {
        0.5 * above0 + 0.5 * (1.0 - above1)
    } else {
        0.5 * (1.0 - above0) + 0.5 * above1
    }
}

fn subsets_of(p: usize, d: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (0..p).combinations(d).collect()
}

/// Monte-Carlo estimate of the expected excess risk of ERM over all size-`d`
/// subsets and the threshold class, on `n` i.i.d. draws per trial.
///
/// Ties in empirical risk go to the first (subset, threshold, orientation)
/// in enumeration order. `budget` caps the number of (subset, classifier)
/// pairs examined per trial.
pub fn empirical_excess_risk(
    trials: usize,
    dgp: &TinyGaussian,
    class: &ThresholdClass,
    d: usize,
    n: usize,
    seed: u64,
    budget: u128,
) -> Result<ExcessRiskEstimate> {
    let p = dgp.p();
    if dgp.mean1.len() != p {
        return Err(Error::DimensionMismatch { expected: p, found: dgp.mean1.len() });
    }
    if d == 0 || d > p {
        return Err(Error::Precondition(format!("need 0 < d ≤ p, got d={d} p={p}")));
    }
    if trials == 0 || n == 0 || class.size() == 0 {
        return Err(Error::Precondition("need at least one trial, sample and classifier".into()));
    }
    let needed = binomial(p as u64, d as u64).saturating_mul(class.size() as u128);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }

    let subsets = subsets_of(p, d);
    let sd = (d as f64).sqrt();
    let risks: Vec<Vec<f64>> = subsets
        .iter()
        .map(|s| {
            let mu0: f64 = s.iter().map(|&j| dgp.mean0[j]).sum();
            let mu1: f64 = s.iter().map(|&j| dgp.mean1[j]).sum();
            class.members().map(|(t, sign)| population_risk(mu0, mu1, sd, t, sign)).collect()
        })
        .collect();
    let best_risk = risks.iter().flatten().copied().fold(f64::INFINITY, f64::min);

    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = SimRng::new(mix(seed, trial as u64));
            let mut x = vec![0.0; n * p];
            let mut y = vec![0usize; n];
            for i in 0..n {
                y[i] = (rng.next_u64() >> 63) as usize;
                let means = if y[i] == 0 { &dgp.mean0 } else { &dgp.mean1 };
                for j in 0..p {
                    x[i * p + j] = rng.normal(means[j], 1.0);
                }
            }
            let mut best: Option<(usize, f64)> = None;
            for (si, s) in subsets.iter().enumerate() {
                let sums: Vec<f64> = (0..n).map(|i| s.iter().map(|&j| x[i * p + j]).sum()).collect();
                for (ci, (t, sign)) in class.members().enumerate() {
                    let errors = sums
                        .iter()
                        .zip(&y)
                        .filter(|(&v, &label)| usize::from(sign * (v - t) > 0.0) != label)
                        .count();
                    if best.is_none_or(|(e, _)| errors < e) {
                        best = Some((errors, risks[si][ci]));
                    }
                }
            }
            best.expect("non-empty class").1 - best_risk
        })
        .collect();

    let t = trials as f64;
    let mean = per_trial.iter().sum::<f64>() / t;
    let se = if trials > 1 {
        (per_trial.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (t - 1.0)).sqrt() / t.sqrt()
    } else {
        0.0
    };
    Ok(ExcessRiskEstimate {
        mean,
        se,
        per_trial,
        best_risk,
    })
}
