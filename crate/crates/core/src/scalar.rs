//! Scalar traits shared by every module.
//!
//! [`Real`] is the floating type (`f32` or `f64`); [`Scalar`] is anything a
//! dense matrix entry can be and still have a modulus, i.e. a real or a
//! `Complex<Real>`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign};

pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static + Scalar<Real = Self>
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64;
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

pub trait Scalar: Copy + Num + Neg<Output = Self> + Debug + Send + Sync + 'static {
    type Real: Real;

    fn modulus(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn conj(self) -> Self;
    fn finite(self) -> bool;
}

macro_rules! real_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn from_real(r: $t) -> $t {
                r
            }
            #[inline]
            fn conj(self) -> $t {
                self
            }
            #[inline]
            fn finite(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

real_scalar!(f32);
real_scalar!(f64);

impl<T: Real> Scalar for Complex<T> {
    type Real = T;
    #[inline]
    fn modulus(self) -> T {
        self.norm()
    }
    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Combined absolute/relative comparison policy.
///
/// Two values agree when `|a - b| <= abs_tol + rel_tol * max(|a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs_tol: T,
    pub rel_tol: T,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self { abs_tol: T::lit(1e-10), rel_tol: T::lit(1e-9) }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(abs_tol: T, rel_tol: T) -> crate::Result<Self> {
        if !(abs_tol > T::zero() && rel_tol > T::zero()) {
            return crate::error::domain("tolerances must be strictly positive");
        }
        Ok(Self { abs_tol, rel_tol })
    }

    /// Same tolerance for both parts.
    pub fn uniform(tol: T) -> Self {
        Self { abs_tol: tol, rel_tol: tol }
    }

    pub fn close<S: Scalar<Real = T>>(&self, a: S, b: S) -> bool {
        let scale = a.modulus().max(b.modulus());
        (a - b).modulus() <= self.abs_tol + self.rel_tol * scale
    }

    /// `true` when `x` is within the absolute tolerance of zero.
    pub fn is_zero<S: Scalar<Real = T>>(&self, x: S) -> bool {
        x.modulus() <= self.abs_tol
    }
}

/// Shorthand used by the modules: the imaginary unit.
#[inline]
pub(crate) fn i_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}
