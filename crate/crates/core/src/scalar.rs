//! Scalar abstraction shared by every numerical module.
//!
//! All physics code is written against [`Real`], which is satisfied by `f32`
//! and `f64`. Complex amplitudes are `num_complex::Complex<T>`.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FloatConst, ToPrimitive};

/// Real floating-point scalar usable by the simulator.
pub trait Real: RealField + Copy + FloatConst + ToPrimitive {}

impl<T> Real for T where T: RealField + Copy + FloatConst + ToPrimitive {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Lossy conversion used for diagnostics and file output.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    nalgebra::convert(n as f64)
}

/// `e^{i angle}`.
#[inline]
pub fn cis<T: Real>(angle: T) -> Complex<T> {
    Complex::new(angle.cos(), angle.sin())
}

/// Tolerance for structural checks (unitarity, Hermiticity) on inputs: about
/// 1.8e-12 for `f64` and 6e-6 for `f32`.
pub fn structural_tolerance<T: Real>() -> T {
    T::default_epsilon().powf(lit(0.75))
}
