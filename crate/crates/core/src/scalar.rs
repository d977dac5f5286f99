//! Numeric traits shared by the scoring, balance and classifier code.
//!
//! Two tiers exist. [`Scalar`] only needs ordered field arithmetic, so exact
//! types such as [`num_rational::Ratio`] satisfy it; it backs the
//! constructiveness algebra and the rank-based AUC. [`Real`] adds the
//! transcendental functions needed for geodesy, entropy and optimisation and
//! is implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Ordered arithmetic scalar. Exact rationals qualify.
pub trait Scalar: Num + Copy + PartialOrd + FromPrimitive + Debug {
    /// Converts a count; counts used here always fit.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }
}

impl<T> Scalar for T where T: Num + Copy + PartialOrd + FromPrimitive + Debug {}

/// Floating-point scalar.
pub trait Real:
    Scalar
    + Float
    + FloatConst
    + ToPrimitive
    + LinalgScalar
    + ScalarOperand
    + Sum
    + Display
    + Send
    + Sync
    + Default
    + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn mean<T: Scalar>(xs: &[T]) -> T {
        let sum = xs.iter().fold(T::zero(), |acc, &x| acc + x);
        sum / T::from_count(xs.len())
    }

    #[test]
    fn rationals_are_scalars() {
        let xs = [Ratio::new(1i64, 3), Ratio::new(2, 3)];
        assert_eq!(mean(&xs), Ratio::new(1, 2));
    }

    #[test]
    fn literals_round_to_target_precision() {
        assert_eq!(<f32 as Real>::lit(0.1), 0.1f32);
        assert_eq!(<f64 as Real>::lit(6371.0).as_f64(), 6371.0);
    }
}
