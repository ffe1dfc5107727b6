//! Numeric abstraction for match values, prices and margins.
//!
//! Every algorithm in the crate is written against [`Scalar`], so the same
//! code runs on `f64` (the default), on plain integers (where all dual
//! updates stay integral) and on exact rationals.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Absolute tolerance used for floating-point comparisons of values and duals.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Num + Copy + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact, so comparisons need no slack.
    const EXACT: bool;

    /// Slack allowed when comparing two values for equality.
    fn tolerance() -> Self;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("value not representable in the scalar type")
    }

    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count not representable in the scalar type")
    }

    /// Integer weight for the general-graph matching solver. Floating and
    /// rational values are scaled by 1e9 and rounded.
    fn matching_weight(self) -> i128 {
        (self.to_f64_lossy() * 1e9).round() as i128
    }

    fn approx_eq(self, other: Self) -> bool {
        let diff = if self > other { self - other } else { other - self };
        diff <= Self::tolerance()
    }

    /// `self <= other` up to tolerance.
    fn approx_le(self, other: Self) -> bool {
        self <= other + Self::tolerance()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn sum_of<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn tolerance() -> Self {
        FLOAT_TOLERANCE
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn tolerance() -> Self {
        1e-4
    }
}

impl Scalar for i64 {
    const EXACT: bool = true;
    fn tolerance() -> Self {
        0
    }
    fn matching_weight(self) -> i128 {
        self as i128
    }
}

impl Scalar for i128 {
    const EXACT: bool = true;
    fn tolerance() -> Self {
        0
    }
    fn matching_weight(self) -> i128 {
        self
    }
}

impl Scalar for Ratio<i64> {
    const EXACT: bool = true;
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

impl Scalar for Ratio<i128> {
    const EXACT: bool = true;
    fn tolerance() -> Self {
        Ratio::from_integer(0)
    }
}

/// Sum helper that does not require `std::iter::Sum` on the scalar.
pub(crate) fn total<S: Scalar>(items: impl IntoIterator<Item = S>) -> S {
    S::sum_of(items)
}
