//! Scalar abstraction shared by the geometry layers.
//!
//! Everything that only needs field arithmetic and the elementary functions
//! is written against [`Real`], so the same code runs in `f32` and `f64`.
//! Invariant tolerances are carried by the scalar type because an `f32`
//! hyperboloid point cannot satisfy `<x,x> = -1` to `1e-10`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used throughout the geometry code.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance for representation-level invariants (sheet, unit norm, lightlike).
    const INVARIANT_TOL: f64;
    /// Tolerance for `G^T J G = J`.
    const LORENTZ_TOL: f64;
    /// Threshold below which a Klein determinant counts as degenerate.
    const DEGENERACY_TOL: f64;
}

impl Real for f64 {
    const INVARIANT_TOL: f64 = 1e-10;
    const LORENTZ_TOL: f64 = 1e-9;
    const DEGENERACY_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const INVARIANT_TOL: f64 = 1e-4;
    const LORENTZ_TOL: f64 = 1e-3;
    const DEGENERACY_TOL: f64 = 1e-6;
}

/// Converts an `f64` literal into the scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Lossy conversion back to `f64`, used for error payloads and reports.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Converts a count into the scalar type.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}
