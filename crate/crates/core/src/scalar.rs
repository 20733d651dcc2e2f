//! Scalar abstraction shared by the dataset, classifier and search code.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar type used for feature values and model parameters.
///
/// Implemented for `f32` and `f64`. Simulation generators and the bound
/// calculator work in `f64` internally and convert at the boundary.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 is representable")
    }

    /// Lossless widening to `f64`.
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("scalar widens to f64")
    }

    fn of_usize(x: usize) -> Self {
        Self::of(x as f64)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
