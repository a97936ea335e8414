//! Floating-point scalar used for probabilities, weights and correlation values.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar the statistical layers are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal or computed value.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 is representable in every Scalar")
    }

    /// Conversion from a count.
    fn of_count(value: u64) -> Self {
        Self::from_u64(value).expect("u64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }

    /// Tolerance for "sums to one" checks, scaled by the number of summed terms.
    fn normalization_tolerance(terms: usize) -> Self {
        let eps = Self::epsilon() * Self::of_count(terms.max(1) as u64) * Self::of(4.0);
        eps.max(Self::of(1e-12))
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Sum
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}
