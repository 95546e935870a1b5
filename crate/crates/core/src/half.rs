//! Half-integer quantum numbers stored as twice their value.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// A half-integer `n/2`, stored as the integer `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    #[inline]
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    #[inline]
    pub const fn twice(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    #[inline]
    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// Converts a float that must be an exact multiple of ½.
    pub fn try_from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 || twice.abs() > 1e6 {
            return Err(Error::Argument(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt(twice.round() as i32))
    }

    /// `j, j-1, …, -j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> {
        let j = self.0;
        (0..=j).map(move |k| HalfInt(j - 2 * k))
    }

    /// `|a-b|, …, a+b` in steps of one.
    pub fn triangle(a: HalfInt, b: HalfInt) -> impl DoubleEndedIterator<Item = HalfInt> {
        let lo = (a.0 - b.0).abs();
        let hi = a.0 + b.0;
        (0..=(hi - lo) / 2).map(move |k| HalfInt(lo + 2 * k))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
