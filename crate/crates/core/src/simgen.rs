//! The three simulated settings.
//!
//! Every generator returns a [`SimPair`] of two independent samples of the
//! same size: the first `n/2` rows carry label 0, the rest label 1. All
//! draws come from one [`SimRng`] seeded by [`SimConfig::seed`], consumed in
//! a fixed order (signal means, then the training rows, then the test rows).
//!
//! * Simulation 1: the first `m` columns have class means `u` (class 0) and
//!   `v` (class 1), redrawn per seed with `uⱼ ~ U(0,1)` and `vⱼ ~ U(−1,0)`.
//! * Simulation 2: columns 0 and 1 are standard normal with correlation
//!   +0.9 in class 0 and −0.9 in class 1; columns 2 and 3 are `N(±0.3, 1)`.
//! * Simulation 3: columns 0 and 1 are uniform on the part of `(−3,3)²`
//!   with `x₀+x₁ > −0.2` (class 0) or `x₀+x₁ < 0.2` (class 1); columns 2 and
//!   3 are `U(−1,3)` and `U(−3,1)`.
//!
//! Remaining columns are standard normal noise.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{write_csv, LabeledDataset};
use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::scalar::Scalar;

const SIM2_RHO: f64 = 0.9;
const SIM2_SHIFT: f64 = 0.3;
const SIM3_HALF_WIDTH: f64 = 3.0;
const SIM3_MARGIN: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Setting {
    Sim1 {
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_p1")]
        p: usize,
        #[serde(default = "default_m")]
        m: usize,
    },
    Sim2 {
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_p23")]
        p: usize,
    },
    Sim3 {
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_p23")]
        p: usize,
    },
}

fn default_n() -> usize {
    500
}
fn default_p1() -> usize {
    100
}
fn default_m() -> usize {
    5
}
fn default_p23() -> usize {
    10
}

impl Setting {
    pub fn sim1() -> Self {
        Setting::Sim1 { n: 500, p: 100, m: 5 }
    }
    pub fn sim2() -> Self {
        Setting::Sim2 { n: 500, p: 10 }
    }
    pub fn sim3() -> Self {
        Setting::Sim3 { n: 500, p: 10 }
    }

    pub fn n(&self) -> usize {
        match *self {
            Setting::Sim1 { n, .. } | Setting::Sim2 { n, .. } | Setting::Sim3 { n, .. } => n,
        }
    }

    pub fn p(&self) -> usize {
        match *self {
            Setting::Sim1 { p, .. } | Setting::Sim2 { p, .. } | Setting::Sim3 { p, .. } => p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Setting::Sim1 { .. } => "sim1",
            Setting::Sim2 { .. } => "sim2",
            Setting::Sim3 { .. } => "sim3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub which: Setting,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(which: Setting, seed: u64) -> Self {
        Self { which, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.which.n();
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!("sample size must be even and ≥ 2, got {n}")));
        }
        match self.which {
            Setting::Sim1 { p, m, .. } => {
                if p == 0 || m > p {
                    return Err(Error::Config(format!("need 1 ≤ p and m ≤ p, got p={p} m={m}")));
                }
            }
            Setting::Sim2 { p, .. } | Setting::Sim3 { p, .. } => {
                if p < 4 {
                    return Err(Error::Config(format!("need p ≥ 4, got {p}")));
                }
            }
        }
        Ok(())
    }
}

/// Class means of the signal columns in Simulation 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMeans {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimPair<T> {
    pub train: LabeledDataset<T>,
    pub test: LabeledDataset<T>,
    /// Only set for Simulation 1.
    pub means: Option<SignalMeans>,
}

impl<T: Scalar> SimPair<T> {
    /// Writes `train.csv` and `test.csv` into `dir`.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            reason: e.to_string(),
        })?;
        write_csv(&self.train, dir.join("train.csv"))?;
        write_csv(&self.test, dir.join("test.csv"))
    }
}

/// Dispatches on the configured setting.
pub fn generate<T: Scalar>(cfg: &SimConfig) -> Result<SimPair<T>> {
    match cfg.which {
        Setting::Sim1 { .. } => gen_sim1(cfg),
        Setting::Sim2 { .. } => gen_sim2(cfg),
        Setting::Sim3 { .. } => gen_sim3(cfg),
    }
}

fn sample<T: Scalar>(
    rng: &mut SimRng,
    n: usize,
    p: usize,
    mut row: impl FnMut(&mut SimRng, usize, &mut [f64]),
) -> Result<LabeledDataset<T>> {
    let mut values = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    let mut buf = vec![0.0; p];
    for i in 0..n {
        let class = usize::from(i >= n / 2);
        row(rng, class, &mut buf);
        values.extend(buf.iter().map(|&x| T::of(x)));
        labels.push(class);
    }
    LabeledDataset::new(values, p, labels)
}

fn expect_setting(cfg: &SimConfig, want: &str) -> Result<()> {
    cfg.validate()?;
    if cfg.which.name() != want {
        return Err(Error::Config(format!("expected a {want} setting, got {}", cfg.which.name())));
    }
    Ok(())
}

pub fn gen_sim1<T: Scalar>(cfg: &SimConfig) -> Result<SimPair<T>> {
    expect_setting(cfg, "sim1")?;
    let Setting::Sim1 { n, p, m } = cfg.which else { unreachable!() };
    let mut rng = SimRng::new(cfg.seed);
    let u: Vec<f64> = (0..m).map(|_| rng.uniform(0.0, 1.0)).collect();
    let v: Vec<f64> = (0..m).map(|_| rng.uniform(-1.0, 0.0)).collect();
    let mut row = |rng: &mut SimRng, class: usize, out: &mut [f64]| {
        let means = if class == 0 { &u } else { &v };
        for (j, x) in out.iter_mut().enumerate() {
            let mean = if j < m { means[j] } else { 0.0 };
            *x = rng.normal(mean, 1.0);
        }
    };
    let train = sample(&mut rng, n, p, &mut row)?;
    let test = sample(&mut rng, n, p, &mut row)?;
    Ok(SimPair {
        train,
        test,
        means: Some(SignalMeans { u, v }),
    })
}

pub fn gen_sim2<T: Scalar>(cfg: &SimConfig) -> Result<SimPair<T>> {
    expect_setting(cfg, "sim2")?;
    let (n, p) = (cfg.which.n(), cfg.which.p());
    let mut rng = SimRng::new(cfg.seed);
    let tail = (1.0 - SIM2_RHO * SIM2_RHO).sqrt();
    let row = |rng: &mut SimRng, class: usize, out: &mut [f64]| {
        let sign = if class == 0 { 1.0 } else { -1.0 };
        let z0 = rng.standard_normal();
        let z1 = rng.standard_normal();
        out[0] = z0;
        out[1] = sign * SIM2_RHO * z0 + tail * z1;
        out[2] = rng.normal(sign * SIM2_SHIFT, 1.0);
        out[3] = rng.normal(sign * SIM2_SHIFT, 1.0);
        for x in &mut out[4..] {
            *x = rng.standard_normal();
        }
    };
    let train = sample(&mut rng, n, p, row)?;
    let test = sample(&mut rng, n, p, row)?;
    Ok(SimPair { train, test, means: None })
}

/// One point of the Simulation 3 region for `class`, by rejection from the
/// square `(−3,3)²`. Also returns the number of proposals used.
pub fn sim3_region_point(rng: &mut SimRng, class: usize) -> ((f64, f64), usize) {
    let mut proposals = 0;
    loop {
        proposals += 1;
        let x = rng.uniform(-SIM3_HALF_WIDTH, SIM3_HALF_WIDTH);
        let y = rng.uniform(-SIM3_HALF_WIDTH, SIM3_HALF_WIDTH);
        let inside = if class == 0 {
            x + y > -SIM3_MARGIN
        } else {
            x + y < SIM3_MARGIN
        };
        if inside {
            return ((x, y), proposals);
        }
    }
}

pub fn gen_sim3<T: Scalar>(cfg: &SimConfig) -> Result<SimPair<T>> {
    expect_setting(cfg, "sim3")?;
    let (n, p) = (cfg.which.n(), cfg.which.p());
    let mut rng = SimRng::new(cfg.seed);
    let row = |rng: &mut SimRng, class: usize, out: &mut [f64]| {
        let ((x, y), _) = sim3_region_point(rng, class);
        out[0] = x;
        out[1] = y;
        let (lo, hi) = if class == 0 { (-1.0, 3.0) } else { (-3.0, 1.0) };
        out[2] = rng.uniform(lo, hi);
        out[3] = rng.uniform(lo, hi);
        for x in &mut out[4..] {
            *x = rng.standard_normal();
        }
    };
    let train = sample(&mut rng, n, p, row)?;
    let test = sample(&mut rng, n, p, row)?;
    Ok(SimPair { train, test, means: None })
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Bayes risk of separating `N(u, I)` from `N(v, I)` with equal priors:
/// `Φ(−‖u−v‖/2)`.
///
/// # Panics
///
/// If `u` and `v` differ in length.
pub fn sim1_bayes_risk(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "mean vectors differ in length");
    let dist = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    normal_cdf(-dist / 2.0)
}
