//! Scalar abstractions shared by the numerical kernels.
//!
//! The dense linear algebra, the integrators and the signal families are
//! written once against [`Real`] and instantiated for `f32` and `f64`.
//! Matrices may also hold complex entries, which is what [`Element`] is for.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
    + Element<Real = Self>
{
    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// Converts a count into this type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Matrix entry: a real scalar or a complex number over one.
pub trait Element:
    Copy + Num + NumAssign + Neg<Output = Self> + Debug + Send + Sync + 'static
{
    type Real: Real;

    fn modulus(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn conj(self) -> Self;
    fn is_finite_entry(self) -> bool;
}

macro_rules! impl_real_element {
    ($t:ty) => {
        impl Element for $t {
            type Real = $t;
            #[inline]
            fn modulus(self) -> $t {
                self.abs()
            }
            #[inline]
            fn from_real(r: $t) -> Self {
                r
            }
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn is_finite_entry(self) -> bool {
                <$t>::is_finite(self)
            }
        }
    };
}

impl_real_element!(f32);
impl_real_element!(f64);

impl<S: Real> Element for Complex<S> {
    type Real = S;
    #[inline]
    fn modulus(self) -> S {
        self.norm()
    }
    #[inline]
    fn from_real(r: S) -> Self {
        Complex::new(r, S::zero())
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn is_finite_entry(self) -> bool {
        Float::is_finite(self.re) && Float::is_finite(self.im)
    }
}
