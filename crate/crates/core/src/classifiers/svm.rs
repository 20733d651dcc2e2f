//! Binary C-SVM with RBF kernel, trained by SMO.
//!
//! The solver follows the LIBSVM scheme: maximal-violating-pair selection
//! with second-order working-set choice, a full precomputed kernel matrix
//! and stopping when the KKT gap drops below `tol`.

use crate::scalar::Scalar;

const TAU: f64 = 1e-12;

/// `exp(−γ‖a−b‖²)`.
fn rbf<T: Scalar>(a: &[T], b: &[T], gamma: T) -> T {
    let d2 = a
        .iter()
        .zip(b)
        .map(|(&u, &v)| (u - v) * (u - v))
        .fold(T::zero(), |s, v| s + v);
    (-gamma * d2).exp()
}

/// One trained binary machine; positive decision values mean the `+1` side.
#[derive(Debug, Clone)]
pub struct SvmMachine<T> {
    support: Vec<T>,
    coef: Vec<T>,
    rho: T,
    gamma: T,
    dim: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SmoParams<T> {
    pub cost: T,
    pub gamma: T,
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> SvmMachine<T> {
    /// Trains on row-major `x` (`y.len()` rows of `dim` values) with labels
    /// `±1`. Returns the machine and whether SMO met the tolerance.
    pub(crate) fn train(x: &[T], dim: usize, y: &[i8], params: SmoParams<T>) -> (Self, bool) {
        let n = y.len();
        let c = params.cost;
        let yf: Vec<T> = y.iter().map(|&v| if v > 0 { T::one() } else { -T::one() }).collect();

        let rows: Vec<&[T]> = x.chunks_exact(dim).collect();
        let mut kernel = vec![T::zero(); n * n];
        for i in 0..n {
            kernel[i * n + i] = T::one();
            for j in 0..i {
                let k = rbf(rows[i], rows[j], params.gamma);
                kernel[i * n + j] = k;
                kernel[j * n + i] = k;
            }
        }

        let mut alpha = vec![T::zero(); n];
        let mut grad = vec![-T::one(); n];
        let tau = T::of(TAU);
        let two = T::of(2.0);
        let upper = |a: T| a >= c;
        let lower = |a: T| a <= T::zero();
        let mut converged = false;

        for _ in 0..params.max_iter {
            let mut gmax = T::neg_infinity();
            let mut i_sel = None;
            for t in 0..n {
                let v = -yf[t] * grad[t];
                let eligible = if y[t] > 0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
                if eligible && v >= gmax {
                    gmax = v;
                    i_sel = Some(t);
                }
            }
            let Some(i) = i_sel else {
                converged = true;
                break;
            };
            let ki = &kernel[i * n..(i + 1) * n];

            let mut gmax2 = T::neg_infinity();
            let mut j_sel = None;
            let mut best_obj = T::infinity();
            for t in 0..n {
                let (eligible, yg) = if y[t] > 0 {
                    (!lower(alpha[t]), grad[t])
                } else {
                    (!upper(alpha[t]), -grad[t])
                };
                if !eligible {
                    continue;
                }
                if yg >= gmax2 {
                    gmax2 = yg;
                }
                let grad_diff = gmax + yg;
                if grad_diff > T::zero() {
                    // K_ii + K_tt − 2 K_it with K_ii = K_tt = 1.
                    let mut quad = two - two * ki[t];
                    if quad <= T::zero() {
                        quad = tau;
                    }
                    let obj = -(grad_diff * grad_diff) / quad;
                    if obj <= best_obj {
                        best_obj = obj;
                        j_sel = Some(t);
                    }
                }
            }
            let Some(j) = j_sel else {
                converged = true;
                break;
            };
            if gmax + gmax2 < params.tol {
                converged = true;
                break;
            }

            let (old_i, old_j) = (alpha[i], alpha[j]);
            let qij = yf[i] * yf[j] * ki[j];
            if y[i] != y[j] {
                let mut quad = two + two * qij;
                if quad <= T::zero() {
                    quad = tau;
                }
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] = alpha[i] + delta;
                alpha[j] = alpha[j] + delta;
                if diff > T::zero() {
                    if alpha[j] < T::zero() {
                        alpha[j] = T::zero();
                        alpha[i] = diff;
                    }
                } else if alpha[i] < T::zero() {
                    alpha[i] = T::zero();
                    alpha[j] = -diff;
                }
                if diff > T::zero() {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let mut quad = two - two * qij;
                if quad <= T::zero() {
                    quad = tau;
                }
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] = alpha[i] - delta;
                alpha[j] = alpha[j] + delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < T::zero() {
                    alpha[j] = T::zero();
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < T::zero() {
                    alpha[i] = T::zero();
                    alpha[j] = sum;
                }
            }

            let di = (alpha[i] - old_i) * yf[i];
            let dj = (alpha[j] - old_j) * yf[j];
            let kj = &kernel[j * n..(j + 1) * n];
            for t in 0..n {
                grad[t] = grad[t] + yf[t] * (ki[t] * di + kj[t] * dj);
            }
        }

        // Offset: mean of y·G over free vectors, midpoint of the bounds otherwise.
        let mut ub = T::infinity();
        let mut lb = T::neg_infinity();
        let mut free = 0usize;
        let mut sum_free = T::zero();
        for t in 0..n {
            let yg = yf[t] * grad[t];
            let at_upper = upper(alpha[t]);
            let at_lower = lower(alpha[t]);
            if at_upper || at_lower {
                let caps_ub = (at_upper && y[t] < 0) || (at_lower && y[t] > 0);
                if caps_ub {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum_free = sum_free + yg;
            }
        }
        let rho = if free > 0 {
            sum_free / T::of_usize(free)
        } else if ub.is_finite() && lb.is_finite() {
            (ub + lb) / two
        } else {
            T::zero()
        };

        let mut support = Vec::new();
        let mut coef = Vec::new();
        for t in 0..n {
            if alpha[t] > T::zero() {
                support.extend_from_slice(rows[t]);
                coef.push(yf[t] * alpha[t]);
            }
        }
        (
            Self {
                support,
                coef,
                rho,
                gamma: params.gamma,
                dim,
            },
            converged,
        )
    }

    pub fn decision(&self, x: &[T]) -> T {
        self.support
            .chunks_exact(self.dim)
            .zip(&self.coef)
            .map(|(sv, &a)| a * rbf(sv, x, self.gamma))
            .fold(T::zero(), |s, v| s + v)
            - self.rho
    }

    pub fn n_support(&self) -> usize {
        self.coef.len()
    }
}
