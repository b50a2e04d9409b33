//! Scalar abstraction over the floating-point type used by every module.
//!
//! All core math is written against [`Scalar`]; `f64` is the working type
//! for production scans (gaps reach 1e-19 and below), `f32` instantiations
//! exist for callers that only need coarse queries.

use std::fmt;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + iter::SumMarker
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossy cast from `f64`; every `f64` literal used by the crate is
    /// representable in `f32` with acceptable rounding.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 -> Scalar cast")
    }

    /// Level index as a scalar (rounds for indices above the mantissa range).
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize -> Scalar cast")
    }

    /// Level index as a scalar.
    #[inline]
    fn of_u64(n: u64) -> Self {
        Self::from_u64(n).expect("u64 -> Scalar cast")
    }

    /// Back to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar -> f64 cast")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

mod iter {
    /// Private supertrait so `Scalar` stays sealed to `f32`/`f64`.
    pub trait SumMarker: std::iter::Sum {}
    impl SumMarker for f32 {}
    impl SumMarker for f64 {}
}
