//! Scalar fields used throughout the crate.
//!
//! Everything that can be exact is computed over [`Rational`] (arbitrary
//! precision) or its Gaussian extension [`ComplexRational`]. The `f64`
//! instances exist for the float mode, where square roots and exponentials
//! enter.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type ComplexRational = Complex<BigRational>;
pub type Complex64 = Complex<f64>;

/// A field we can do linear algebra over.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic in this field is exact.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;
    fn conj(&self) -> Self;
    /// Modulus as a float, used for residual reporting only.
    fn modulus(&self) -> f64;
}

/// An ordered (real) scalar field.
pub trait RealScalar: Scalar + PartialOrd + num_traits::Num {
    fn as_f64(&self) -> f64;
    fn from_f64_lossy(v: f64) -> Self;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn modulus(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

impl RealScalar for Rational {
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn conj(&self) -> Self {
        *self
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl RealScalar for f64 {
    fn as_f64(&self) -> f64 {
        *self
    }
    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}

impl<S: RealScalar> Scalar for Complex<S> {
    const EXACT: bool = S::EXACT;

    fn from_int(v: i64) -> Self {
        Complex::new(S::from_int(v), S::zero())
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn modulus(&self) -> f64 {
        self.re.as_f64().hypot(self.im.as_f64())
    }
}

/// Lifts a real scalar into its complexification.
pub fn complexify<S: RealScalar>(v: &S) -> Complex<S> {
    Complex::new(v.clone(), S::zero())
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.7"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse(format!("empty rational {text:?}")));
    }
    if t.contains('/') {
        return BigRational::from_str(t)
            .map_err(|_| Error::Parse(format!("malformed rational {text:?}")));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("malformed rational {text:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|ch| ch.is_ascii_digit()) {
        return Err(Error::Parse(format!("malformed rational {text:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| Error::Parse(format!("malformed rational {text:?}")))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Ok(if neg { -value } else { value })
}

/// Prints a rational as `p/q` (always with a denominator, for golden files).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}
