//! Scalar abstraction shared by every stage of the pipeline.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the conversion pipeline can run on.
///
/// Implemented for `f32` and `f64`. `Display` must produce the shortest
/// representation that parses back to the same value, which both primitive
/// float types guarantee; the VXG header relies on it for byte-exact
/// round trips.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Largest tolerated condition number of a 3x3 normal matrix.
    fn max_condition() -> Self;

    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("literal representable in scalar type")
    }

    fn from_index(i: usize) -> Self {
        <Self as FromPrimitive>::from_usize(i).expect("index representable in scalar type")
    }
}

impl Scalar for f64 {
    fn max_condition() -> Self {
        1e12
    }
}

impl Scalar for f32 {
    // 1e12 is far past what single precision can resolve.
    fn max_condition() -> Self {
        1e5
    }
}
