//! Simulation time scalars.
//!
//! The kernel is generic over the tick type. Anything totally ordered with
//! exact addition works; floats are excluded because event ordering must be
//! exact for traces to be reproducible.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Sub};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Zero};

/// A scalar usable as simulation time.
pub trait TimeScalar:
    Copy + Ord + Debug + Display + Zero + Add<Output = Self> + Sub<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    /// Exact `(numerator, denominator)` form with a positive denominator.
    fn to_ratio(&self) -> (i64, i64);

    /// Inverse of [`TimeScalar::to_ratio`]; `None` when the value is not
    /// representable in this scalar type.
    fn from_ratio(num: i64, den: i64) -> Option<Self>;
}

impl TimeScalar for i64 {
    fn to_ratio(&self) -> (i64, i64) {
        (*self, 1)
    }

    fn from_ratio(num: i64, den: i64) -> Option<Self> {
        (den != 0 && num % den == 0).then(|| num / den)
    }
}

impl TimeScalar for u64 {
    fn to_ratio(&self) -> (i64, i64) {
        (*self as i64, 1)
    }

    fn from_ratio(num: i64, den: i64) -> Option<Self> {
        if den == 0 || num % den != 0 {
            return None;
        }
        u64::try_from(num / den).ok()
    }
}

impl TimeScalar for Ratio<i64> {
    fn to_ratio(&self) -> (i64, i64) {
        (*self.numer(), *self.denom())
    }

    fn from_ratio(num: i64, den: i64) -> Option<Self> {
        (den != 0).then(|| Ratio::new(num, den))
    }
}

/// A time advance: finite, or passive (`+inf`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Span<T> {
    Finite(T),
    Infinite,
}

impl<T: TimeScalar> Span<T> {
    pub fn zero() -> Self {
        Span::Finite(T::zero())
    }

    pub fn ticks(n: u64) -> Self {
        Span::Finite(T::from_u64(n).expect("tick count representable"))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Span::Finite(_))
    }

    /// `base + self`, or `None` for an infinite span.
    pub fn after(&self, base: T) -> Option<T> {
        match self {
            Span::Finite(d) => Some(base + *d),
            Span::Infinite => None,
        }
    }
}

impl<T: Display> Display for Span<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Span::Finite(t) => write!(f, "{t}"),
            Span::Infinite => f.write_str("inf"),
        }
    }
}
