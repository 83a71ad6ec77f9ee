//! Scalar abstraction for probability tables, scores and inference.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type usable for CPT entries, factor values and log scores: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant, rounding to the nearest representable value.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("every f64 is representable (possibly rounded) in a Float type")
    }

    /// Converts a count.
    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize converts to Float")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Float converts to f64")
    }

    /// Tolerance used when checking that a probability vector sums to one.
    fn normalization_tolerance() -> Self {
        Self::of(1e-9).max(Self::epsilon() * Self::of(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
