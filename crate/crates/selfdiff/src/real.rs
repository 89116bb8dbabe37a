//! Scalar abstraction so the numeric core runs in either precision.
//!
//! The training pipeline uses `f32` (checkpoints and dataset blobs store
//! 32-bit floats, so round trips stay bit-exact); the verification suites
//! (gradient checks, schedule identities, EMA contraction) instantiate the
//! same code with `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar used throughout the numeric core.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Sum
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn from_f64_lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in target precision")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand used pervasively when mixing `f64` literals into generic code.
pub fn c<T: Real>(x: f64) -> T {
    T::from_f64_lit(x)
}
