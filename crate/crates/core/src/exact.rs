//! Exact arithmetic in the quadratic field Q(√2).
//!
//! Values are `a + b√2` with rational `a`, `b`. The adiabatic index γ = √2
//! is the case where the Mach-number switch of the compressible Euler boundary
//! eigenvalue sits exactly at |M_n| = 1, which is only checkable exactly here.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_rational::BigRational;
use num_traits::{Num, One, Zero};

use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct QSqrt2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt2 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn sqrt2() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn rational(a: BigRational) -> Self {
        Self::new(a, BigRational::zero())
    }

    fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone())
    }

    /// Field norm a² − 2b², nonzero for every nonzero element.
    fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_int(2) * &self.b * &self.b
    }

    fn signum(&self) -> Ordering {
        let zero = BigRational::zero();
        let sa = self.a.cmp(&zero);
        let sb = self.b.cmp(&zero);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (s1, s2) if s1 == s2 => s1,
            // opposite signs: compare a² with 2b²
            (s1, _) => {
                let lhs = &self.a * &self.a;
                let rhs = BigRational::from_int(2) * &self.b * &self.b;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => s1,
                    Ordering::Less => s1.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN)
            + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}·√2)", self.a, self.b)
    }
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let two = BigRational::from_int(2);
        Self::new(
            &self.a * &rhs.a + two * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl Div for QSqrt2 {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero in Q(√2)");
        let num = self * rhs.conjugate();
        Self::new(num.a / &n, num.b / n)
    }
}

impl Rem for QSqrt2 {
    type Output = Self;
    /// Division is exact in a field, so the remainder is always zero.
    fn rem(self, _rhs: Self) -> Self {
        Self::zero()
    }
}

impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Zero for QSqrt2 {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QSqrt2 {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl Num for QSqrt2 {
    type FromStrRadixErr = <BigRational as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        BigRational::from_str_radix(s, radix).map(Self::rational)
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).signum())
    }
}

impl Scalar for QSqrt2 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::from_ratio(num, den))
    }

    fn magnitude(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl QSqrt2 {
    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }
}
