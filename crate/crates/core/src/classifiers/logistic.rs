//! L1-penalised binary logistic regression.
//!
//! Minimises `(1/n) Σ [ln(1 + e^η) − y η] + λ‖w‖₁` with `η = b + xᵀw` and
//! an unpenalised intercept `b`. Each outer step builds the quadratic
//! (IRLS) model of the log-likelihood, minimises it plus the penalty by
//! cyclic coordinate descent, then backtracks on the true objective.

use crate::linalg::{backward_solve, cholesky, forward_solve};
use crate::scalar::Scalar;

/// Binary machine; positive decision values mean label `1`.
#[derive(Debug, Clone)]
pub struct LogisticMachine<T> {
    pub(crate) weights: Vec<T>,
    pub(crate) intercept: T,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CdParams<T> {
    pub lambda: T,
    pub tol: T,
    pub max_iter: usize,
}

/// Data for one binary problem, column-major for coordinate sweeps.
pub(crate) struct BinaryProblem<T> {
    columns: Vec<Vec<T>>,
    y: Vec<T>,
    n: usize,
}

fn sigmoid<T: Scalar>(eta: T) -> T {
    if eta >= T::zero() {
        T::one() / (T::one() + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (T::one() + e)
    }
}

/// `ln(1 + e^η)` without overflow.
fn softplus<T: Scalar>(eta: T) -> T {
    if eta > T::zero() {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn soft_threshold<T: Scalar>(v: T, t: T) -> T {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

impl<T: Scalar> BinaryProblem<T> {
    /// `rows` is row-major with `dim` columns; `positive[i]` marks label 1.
    pub(crate) fn new(rows: &[T], dim: usize, positive: &[bool]) -> Self {
        let n = positive.len();
        let columns = (0..dim)
            .map(|j| (0..n).map(|i| rows[i * dim + j]).collect())
            .collect();
        let y = positive
            .iter()
            .map(|&p| if p { T::one() } else { T::zero() })
            .collect();
        Self { columns, y, n }
    }

    pub(crate) fn dim(&self) -> usize {
        self.columns.len()
    }

    fn linear_predictor(&self, m: &LogisticMachine<T>) -> Vec<T> {
        let mut eta = vec![m.intercept; self.n];
        for (col, &w) in self.columns.iter().zip(&m.weights) {
            if w != T::zero() {
                for (e, &x) in eta.iter_mut().zip(col) {
                    *e = *e + w * x;
                }
            }
        }
        eta
    }

    fn objective(&self, eta: &[T], weights: &[T], lambda: T) -> T {
        let nll: T = eta
            .iter()
            .zip(&self.y)
            .map(|(&e, &y)| softplus(e) - y * e)
            .sum::<T>()
            / T::of_usize(self.n);
        nll + lambda * weights.iter().map(|w| w.abs()).sum::<T>()
    }

    /// Gradient of the mean negative log-likelihood: `(∂b, ∂w)`.
    pub(crate) fn gradient(&self, m: &LogisticMachine<T>) -> (T, Vec<T>) {
        let eta = self.linear_predictor(m);
        let inv_n = T::one() / T::of_usize(self.n);
        let resid: Vec<T> = eta.iter().zip(&self.y).map(|(&e, &y)| sigmoid(e) - y).collect();
        let g0 = resid.iter().copied().sum::<T>() * inv_n;
        let gw = self
            .columns
            .iter()
            .map(|col| col.iter().zip(&resid).map(|(&x, &r)| x * r).sum::<T>() * inv_n)
            .collect();
        (g0, gw)
    }

    /// Largest coordinate violation of the optimality conditions.
    pub(crate) fn kkt_violation(&self, m: &LogisticMachine<T>, lambda: T) -> T {
        let (g0, gw) = self.gradient(m);
        let mut worst = g0.abs();
        for (g, &w) in gw.iter().zip(&m.weights) {
            let v = if w > T::zero() {
                (*g + lambda).abs()
            } else if w < T::zero() {
                (*g - lambda).abs()
            } else {
                (g.abs() - lambda).max(T::zero())
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Smallest penalty with an all-zero weight vector at the optimum.
    pub(crate) fn lambda_max(&self) -> T {
        let mean = self.y.iter().copied().sum::<T>() / T::of_usize(self.n);
        self.columns
            .iter()
            .map(|col| {
                (col.iter().zip(&self.y).map(|(&x, &y)| x * (mean - y)).sum::<T>()
                    / T::of_usize(self.n))
                .abs()
            })
            .fold(T::zero(), T::max)
    }

    /// Intercept-only start: `b = logit(ȳ)`.
    pub(crate) fn null_machine(&self) -> LogisticMachine<T> {
        let mean = self.y.iter().copied().sum::<T>() / T::of_usize(self.n);
        LogisticMachine {
            weights: vec![T::zero(); self.dim()],
            intercept: (mean / (T::one() - mean)).ln(),
        }
    }

    /// Weighted Gram matrix of `[1, X]` and `[1, X]ᵀ W z / n`, the pieces
    /// of the quadratic model that stay fixed within one outer step.
    fn weighted_moments(&self, hw: &[T], z: &[T]) -> (Vec<T>, Vec<T>) {
        let m = self.dim() + 1;
        let inv_n = T::one() / T::of_usize(self.n);
        let col = |a: usize| if a == 0 { None } else { Some(&self.columns[a - 1]) };
        let mut gram = vec![T::zero(); m * m];
        let mut rhs = vec![T::zero(); m];
        for a in 0..m {
            let ca = col(a);
            let wa: Vec<T> = (0..self.n).map(|i| hw[i] * ca.map_or(T::one(), |c| c[i])).collect();
            for b in 0..=a {
                let s = match col(b) {
                    None => wa.iter().copied().sum::<T>(),
                    Some(cb) => wa.iter().zip(cb).map(|(&u, &x)| u * x).sum::<T>(),
                } * inv_n;
                gram[a * m + b] = s;
                gram[b * m + a] = s;
            }
            rhs[a] = wa.iter().zip(z).map(|(&u, &v)| u * v).sum::<T>() * inv_n;
        }
        (gram, rhs)
    }

    /// Minimises the quadratic model over the current support with the
    /// current signs held fixed, then moves from `cand` toward that point,
    /// stopping where the first weight reaches zero. `work` holds the
    /// working residuals `z − η(cand)` and is kept in sync.
    fn solve_on_support(
        &self,
        cand: &mut LogisticMachine<T>,
        work: &mut [T],
        moments: &(Vec<T>, Vec<T>),
        z: &[T],
        lambda: T,
    ) -> bool {
        let (gram, rhs_full) = moments;
        let full_m = self.dim() + 1;
        let support: Vec<usize> = (0..self.dim()).filter(|&j| cand.weights[j] != T::zero()).collect();
        let idx: Vec<usize> = std::iter::once(0).chain(support.iter().map(|j| j + 1)).collect();
        let m = idx.len();
        let mut sub = vec![T::zero(); m * m];
        let mut sol = vec![T::zero(); m];
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                sub[a * m + b] = gram[ia * full_m + ib];
            }
            sol[a] = rhs_full[ia];
            if a > 0 {
                sol[a] = sol[a] - lambda * cand.weights[support[a - 1]].signum();
            }
        }
        let Some(l) = cholesky(&sub, m) else {
            return false;
        };
        forward_solve(&l, m, &mut sol);
        backward_solve(&l, m, &mut sol);
        if !sol.iter().all(|v| v.is_finite()) {
            return false;
        }
        // Largest fraction of the move that keeps every sign.
        let mut t = T::one();
        let mut blocking = None;
        for (a, &j) in support.iter().enumerate() {
            let old = cand.weights[j];
            let new = sol[a + 1];
            if new.signum() != old.signum() || new == T::zero() {
                let frac = old / (old - new);
                if frac < t {
                    t = frac;
                    blocking = Some(j);
                }
            }
        }
        cand.intercept = cand.intercept + t * (sol[0] - cand.intercept);
        for (a, &j) in support.iter().enumerate() {
            let old = cand.weights[j];
            cand.weights[j] = old + t * (sol[a + 1] - old);
        }
        if let Some(j) = blocking {
            cand.weights[j] = T::zero();
        }
        let eta = self.linear_predictor(cand);
        for ((r, &zi), &e) in work.iter_mut().zip(z).zip(&eta) {
            *r = zi - e;
        }
        true
    }

    /// Minimises the penalised objective from `start`. Returns the solution
    /// and whether the tolerance was met within `max_iter` outer steps.
    pub(crate) fn solve(
        &self,
        start: LogisticMachine<T>,
        params: CdParams<T>,
    ) -> (LogisticMachine<T>, bool) {
        let n = self.n;
        let inv_n = T::one() / T::of_usize(n);
        let lambda = params.lambda;
        let mut m = start;
        let mut eta = self.linear_predictor(&m);
        let mut obj = self.objective(&eta, &m.weights, lambda);
        let weight_floor = T::of(1e-10);
        let inner_tol = params.tol * T::of(1e-2);

        for _ in 0..params.max_iter {
            // Quadratic model around the current iterate.
            let mut hw = Vec::with_capacity(n);
            let mut work = Vec::with_capacity(n);
            for (&e, &y) in eta.iter().zip(&self.y) {
                let p = sigmoid(e);
                let w = (p * (T::one() - p)).max(weight_floor);
                hw.push(w);
                work.push((y - p) / w);
            }
            let curv: Vec<T> = self
                .columns
                .iter()
                .map(|col| col.iter().zip(&hw).map(|(&x, &w)| w * x * x).sum::<T>() * inv_n)
                .collect();
            let curv0 = hw.iter().copied().sum::<T>() * inv_n;

            let z: Vec<T> = eta.iter().zip(&work).map(|(&e, &r)| e + r).collect();
            let mut moments = None;
            let mut cand = m.clone();
            // Full sweeps alternate with sweeps over the nonzero weights only
            // until a full sweep moves nothing.
            let mut active: Vec<usize> = Vec::new();
            let mut full = true;
            for _ in 0..10_000 {
                let mut max_step = T::zero();
                let u0 = work.iter().zip(&hw).map(|(&r, &w)| w * r).sum::<T>() * inv_n;
                let step0 = u0 / curv0;
                if step0 != T::zero() {
                    cand.intercept = cand.intercept + step0;
                    work.iter_mut().for_each(|r| *r = *r - step0);
                    max_step = max_step.max(step0.abs());
                }
                let update = |j: usize, cand: &mut LogisticMachine<T>, work: &mut [T]| -> T {
                    if curv[j] <= T::zero() {
                        return T::zero();
                    }
                    let col = &self.columns[j];
                    let old = cand.weights[j];
                    let u = col
                        .iter()
                        .zip(work.iter())
                        .zip(&hw)
                        .map(|((&x, &r), &w)| w * x * r)
                        .sum::<T>()
                        * inv_n
                        + curv[j] * old;
                    let new = soft_threshold(u, lambda) / curv[j];
                    let delta = new - old;
                    if delta != T::zero() {
                        cand.weights[j] = new;
                        for (r, &x) in work.iter_mut().zip(col) {
                            *r = *r - delta * x;
                        }
                    }
                    delta.abs()
                };
                if full {
                    for j in 0..self.columns.len() {
                        max_step = max_step.max(update(j, &mut cand, &mut work));
                    }
                    if max_step <= inner_tol {
                        break;
                    }
                    let moments = moments.get_or_insert_with(|| self.weighted_moments(&hw, &z));
                    if self.solve_on_support(&mut cand, &mut work, moments, &z, lambda) {
                        continue;
                    }
                    active = (0..self.columns.len()).filter(|&j| cand.weights[j] != T::zero()).collect();
                    full = false;
                } else {
                    for &j in &active {
                        max_step = max_step.max(update(j, &mut cand, &mut work));
                    }
                    if max_step <= inner_tol {
                        full = true;
                    }
                }
            }

            // Backtrack along the Newton direction on the true objective.
            let d0 = cand.intercept - m.intercept;
            let dw: Vec<T> = cand.weights.iter().zip(&m.weights).map(|(&a, &b)| a - b).collect();
            let mut deta = vec![d0; n];
            for (col, &d) in self.columns.iter().zip(&dw) {
                if d != T::zero() {
                    for (e, &x) in deta.iter_mut().zip(col) {
                        *e = *e + d * x;
                    }
                }
            }
            let mut t = T::one();
            let mut accepted = None;
            for _ in 0..40 {
                let trial_w: Vec<T> = m.weights.iter().zip(&dw).map(|(&w, &d)| w + t * d).collect();
                let trial_eta: Vec<T> = eta.iter().zip(&deta).map(|(&e, &d)| e + t * d).collect();
                let trial_obj = self.objective(&trial_eta, &trial_w, lambda);
                if trial_obj <= obj {
                    accepted = Some((trial_w, trial_eta, trial_obj));
                    break;
                }
                t = t * T::of(0.5);
            }
            let step = dw
                .iter()
                .fold(d0.abs(), |acc, d| acc.max(d.abs()))
                * t;
            match accepted {
                Some((w, e, o)) => {
                    m.intercept = m.intercept + t * d0;
                    m.weights = w;
                    eta = e;
                    obj = o;
                }
                None => break,
            }
            if step <= params.tol && self.kkt_violation(&m, lambda) <= params.tol {
                return (m, true);
            }
        }
        let ok = self.kkt_violation(&m, lambda) <= params.tol;
        (m, ok)
    }
}

impl<T: Scalar> LogisticMachine<T> {
    pub fn decision(&self, x: &[T]) -> T {
        self.weights
            .iter()
            .zip(x)
            .fold(self.intercept, |s, (&w, &v)| s + w * v)
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn intercept(&self) -> T {
        self.intercept
    }

    pub fn nonzero(&self) -> usize {
        self.weights.iter().filter(|w| **w != T::zero()).count()
    }
}
