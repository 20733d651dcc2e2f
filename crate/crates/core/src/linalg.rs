//! Small dense routines on row-major square matrices.

use crate::scalar::Scalar;

/// Lower Cholesky factor of the symmetric matrix `a` (`d × d`, row-major).
///
/// Returns `None` when a pivot is not positive relative to the matrix scale,
/// i.e. the matrix is singular or indefinite to working precision.
pub(crate) fn cholesky<T: Scalar>(a: &[T], d: usize) -> Option<Vec<T>> {
    debug_assert_eq!(a.len(), d * d);
    let scale = (0..d).map(|i| a[i * d + i]).fold(T::zero(), T::max);
    let floor = T::epsilon() * T::of_usize(d) * scale;
    let mut l = vec![T::zero(); d * d];
    for j in 0..d {
        let mut pivot = a[j * d + j];
        for k in 0..j {
            pivot = pivot - l[j * d + k] * l[j * d + k];
        }
        if !pivot.is_finite() || pivot <= floor || pivot <= T::zero() {
            return None;
        }
        let ljj = pivot.sqrt();
        l[j * d + j] = ljj;
        for i in j + 1..d {
            let mut s = a[i * d + j];
            for k in 0..j {
                s = s - l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = s / ljj;
        }
    }
    Some(l)
}

/// Solves `L z = b` for lower-triangular `L`.
pub(crate) fn forward_solve<T: Scalar>(l: &[T], d: usize, b: &mut [T]) {
    for i in 0..d {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[i * d + k] * b[k];
        }
        b[i] = s / l[i * d + i];
    }
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub(crate) fn backward_solve<T: Scalar>(l: &[T], d: usize, b: &mut [T]) {
    for i in (0..d).rev() {
        let mut s = b[i];
        for k in i + 1..d {
            s = s - l[k * d + i] * b[k];
        }
        b[i] = s / l[i * d + i];
    }
}

/// `ln det A` from the Cholesky factor of `A`.
pub(crate) fn log_det_from_cholesky<T: Scalar>(l: &[T], d: usize) -> T {
    let two = T::one() + T::one();
    (0..d).map(|i| l[i * d + i].ln()).sum::<T>() * two
}
