//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! Everything below the CLI is generic over [`Real`], which is implemented for
//! `f32` and `f64`. Tolerances that are quoted for double precision are scaled
//! up to a small multiple of the machine epsilon when the type is coarser.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real floating point scalar: `f32` or `f64`.
pub trait Real: RealField + Copy + ToPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Convert an integer into `T`.
#[inline]
pub fn from_int<T: Real>(n: i64) -> T {
    nalgebra::convert(n as f64)
}

/// Lossy conversion to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A tolerance quoted for `f64`, floored at `factor` ulps of `T`.
#[inline]
pub fn tol<T: Real>(quoted: f64, factor: f64) -> T {
    let floor = T::default_epsilon() * lit::<T>(factor);
    let q = lit::<T>(quoted);
    if q > floor {
        q
    } else {
        floor
    }
}

/// `Complex::new(re, 0)`.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `e^{i phase}`.
#[inline]
pub fn cis<T: Real>(phase: T) -> Complex<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, s)
}

/// `|z|` without requiring `num_traits::Float` on `T`.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// `arg z` in `(-π, π]`.
#[inline]
pub fn carg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// Largest of a non-empty iterator of reals; `zero` when empty.
pub fn max_of<T: Real, I: IntoIterator<Item = T>>(it: I) -> T {
    it.into_iter().fold(T::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(tol::<f64>(1e-12, 16.0), 1e-12);
        let t32: f32 = tol(1e-12, 16.0);
        assert!(t32 > 1e-7 && t32 < 1e-5);
    }

    #[test]
    fn cis_is_unit() {
        let z = cis(0.7_f64);
        assert!((z.norm() - 1.0).abs() < 1e-15);
        assert!((z.arg() - 0.7).abs() < 1e-15);
    }
}
