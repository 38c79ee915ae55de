//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All physics is written against [`Real`], which is satisfied by `f32` and
//! `f64`. The tolerances quoted throughout the documentation refer to `f64`.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::ToPrimitive;

pub use num_complex::Complex;

/// Real scalar usable by the solvers.
pub trait Real: RealField + Copy + ToPrimitive + Display + Debug + Send + Sync + rustfft::FftNum + 'static {}

impl<T> Real for T where T: RealField + Copy + ToPrimitive + Display + Debug + Send + Sync + rustfft::FftNum + 'static {}

#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub(crate) fn from_usize<T: Real>(n: usize) -> T {
    nalgebra::convert(n as f64)
}

#[inline]
pub(crate) fn from_i64<T: Real>(n: i64) -> T {
    nalgebra::convert(n as f64)
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `exp(i theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Multiply by the imaginary unit.
#[inline]
pub(crate) fn times_i<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(-z.im, z.re)
}

#[inline]
pub(crate) fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}
