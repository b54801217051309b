//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the discretizations are generic over.
///
/// Implemented for `f32` and `f64`. Everything that needs reproducible table
/// values (quadrature up to `M = 200`, the coupled solvers) is exercised in
/// `f64`; `f32` is supported for cheap exploratory runs.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in Real")
    }

    /// Converts an index or count into `Self`.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in Real")
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Default
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + Send
        + Sync
        + 'static
{
}
