//! Scalar abstraction for the numerical core.
//!
//! Everything downstream works over any real field that can round-trip
//! through `f64`; in practice this means `f32` or `f64`. Noise draws are
//! produced in `f64` and converted, so a run is deterministic for every
//! scalar type given the same seeds.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable by the solver: a dense-linear-algebra field with
/// conversions from/to `f64` for constants, RNG draws, and trace output.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy {
    fn finite(self) -> bool;
    fn as_f64(self) -> f64;
    /// Machine epsilon of the scalar type.
    fn eps() -> Self;
}

impl Scalar for f64 {
    fn finite(self) -> bool {
        self.is_finite()
    }
    fn as_f64(self) -> f64 {
        self
    }
    fn eps() -> Self {
        f64::EPSILON
    }
}

impl Scalar for f32 {
    fn finite(self) -> bool {
        self.is_finite()
    }
    fn as_f64(self) -> f64 {
        f64::from(self)
    }
    fn eps() -> Self {
        f32::EPSILON
    }
}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}

/// Converts a count into the working scalar type.
#[inline]
pub fn real_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count not representable in scalar type")
}
