//! Scalar abstractions shared by every module.
//!
//! Most of the crate only needs field arithmetic and an ordering, so it is
//! written against [`Scalar`], which both `f64` and exact rationals satisfy.
//! Quadrature needs transcendental-free real arithmetic with `Copy`
//! semantics and is written against [`RealScalar`].

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar: `f32`, `f64`, or an exact rational such as
/// [`BigRational`](num_rational::BigRational).
pub trait Scalar:
    Num + FromPrimitive + ToPrimitive + PartialOrd + Clone + Debug + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Num + FromPrimitive + ToPrimitive + PartialOrd + Clone + Debug + Send + Sync + 'static
{
}

/// Floating-point scalar.
pub trait RealScalar: Scalar + Float {}

impl<T> RealScalar for T where T: Scalar + Float {}

/// Converts an `f64` literal (tolerances, probe points) into `T`.
///
/// Panics on non-finite input, which never occurs for the constants used here.
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("finite literal is representable")
}

pub(crate) fn from_count<T: Scalar>(v: usize) -> T {
    T::from_usize(v).expect("count is representable")
}

/// Lossy view used only for error messages and reports.
pub(crate) fn approx<T: Scalar>(v: &T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn abs<T: Scalar>(v: T) -> T {
    if v < T::zero() {
        T::zero() - v
    } else {
        v
    }
}

/// Evaluates `coeffs[0] + coeffs[1] x + ... + coeffs[k] x^k` by Horner's rule.
pub(crate) fn poly_eval<T: Scalar>(coeffs: &[T], x: &T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
}

pub(crate) fn powi<T: Scalar>(x: &T, exp: usize) -> T {
    let mut out = T::one();
    let mut base = x.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            out = out * base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    out
}
