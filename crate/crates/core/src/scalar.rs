//! Scalar abstractions shared by every numerical module.
//!
//! All operators are written against [`Real`], so the same code runs in
//! `f32` and `f64`. Fields on the sphere bundle may additionally be complex,
//! which is what [`FieldElem`] abstracts over.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive, Zero};

/// Real floating point type the crate is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Sum
    + Default
    + Display
    + LowerExp
    + NumAssign
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("index representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Element type of a sampled field: either a real scalar or a complex number.
pub trait FieldElem<T: Real>:
    Copy
    + Debug
    + Send
    + Sync
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<T, Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    fn to_complex(self) -> Complex<T>;
    /// Real types keep only the real part.
    fn from_complex(c: Complex<T>) -> Self;
    fn norm_sqr(self) -> T;
    /// `self * conj(other)`.
    fn mul_conj(self, other: Self) -> Self;
    fn mul_elem(self, other: Self) -> Self;
    fn conj(self) -> Self;
    const IS_COMPLEX: bool;
}

impl<T: Real> FieldElem<T> for T {
    #[inline]
    fn to_complex(self) -> Complex<T> {
        Complex::new(self, T::zero())
    }
    #[inline]
    fn from_complex(c: Complex<T>) -> Self {
        c.re
    }
    #[inline]
    fn norm_sqr(self) -> T {
        self * self
    }
    #[inline]
    fn mul_conj(self, other: Self) -> Self {
        self * other
    }
    #[inline]
    fn mul_elem(self, other: Self) -> Self {
        self * other
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    const IS_COMPLEX: bool = false;
}

impl<T: Real> FieldElem<T> for Complex<T> {
    #[inline]
    fn to_complex(self) -> Complex<T> {
        self
    }
    #[inline]
    fn from_complex(c: Complex<T>) -> Self {
        c
    }
    #[inline]
    fn norm_sqr(self) -> T {
        Complex::norm_sqr(&self)
    }
    #[inline]
    fn mul_conj(self, other: Self) -> Self {
        self * Complex::conj(&other)
    }
    #[inline]
    fn mul_elem(self, other: Self) -> Self {
        self * other
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    const IS_COMPLEX: bool = true;
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let tau = T::TAU();
    let mut w = a % tau;
    if w <= -T::PI() {
        w += tau;
    } else if w > T::PI() {
        w -= tau;
    }
    w
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_positive<T: Real>(a: T) -> T {
    let tau = T::TAU();
    let mut w = a % tau;
    if w < T::zero() {
        w += tau;
    }
    if w >= tau {
        w -= tau;
    }
    w
}
