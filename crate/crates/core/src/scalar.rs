//! Scalar abstractions.
//!
//! Two tiers are used across the crate. [`Scalar`] only asks for field
//! arithmetic and exact construction from integer ratios, which is all the SBP
//! coefficient tables and the `Psi` switching function need; it is implemented
//! for `f32`, `f64`, [`BigRational`] and the exact surd field
//! [`crate::exact::QSqrt2`]. [`Real`] adds `num_traits::Float` and is what the
//! flow solvers run on.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// Field arithmetic with exact rational constants.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Neg<Output = Self> {
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }

    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f32 / den as f32
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Floating point scalar used by the solvers.
pub trait Real:
    Scalar
    + Float
    + FloatConst
    + FromPrimitive
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Literal conversion; every `f64` literal is representable up to rounding.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Scalar
        + Float
        + FloatConst
        + FromPrimitive
        + Display
        + LowerExp
        + Default
        + Sum
        + Send
        + Sync
        + 'static
{
}

/// Largest magnitude in a slice, zero for an empty slice.
pub fn max_magnitude<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| {
        let m = v.magnitude();
        if m > acc {
            m
        } else {
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_constants() {
        assert_eq!(f64::from_ratio(1, 2), 0.5);
        assert_eq!(f32::from_ratio(-3, 4), -0.75);
        let r = BigRational::from_ratio(342523, 518400);
        assert_eq!(r * BigRational::from_int(518400), BigRational::from_int(342523));
    }

    #[test]
    fn magnitude_and_max() {
        assert_eq!((-2.5f64).magnitude(), 2.5);
        assert_eq!(max_magnitude(&[1.0, -3.0, 2.0]), 3.0);
        assert_eq!(max_magnitude::<f64>(&[]), 0.0);
    }
}
