//! Numeric carriers for jets: binary64 floats and exact big rationals.
//!
//! Float mode follows IEEE-754 rounding throughout; no attempt is made to
//! compensate accumulated error. Rational mode is exact for the field
//! operations and refuses transcendental functions instead of approximating.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};

use crate::jet::JetError;

/// Which scalar realization a computation runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Rational,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Rational => "rational",
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(numer: i64, denom: i64) -> Result<Self, JetError>;
    /// Parses an unsigned decimal literal such as `12`, `0.25` or `3.`.
    fn from_decimal(text: &str) -> Option<Self>;
    /// Lossless in rational mode (every finite double is a dyadic rational).
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    fn checked_div(&self, rhs: &Self) -> Result<Self, JetError>;

    fn exp(&self) -> Result<Self, JetError>;
    fn ln(&self) -> Result<Self, JetError>;
    fn sin(&self) -> Result<Self, JetError>;
    fn cos(&self) -> Result<Self, JetError>;
    fn sqrt(&self) -> Result<Self, JetError>;

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(numer: i64, denom: i64) -> Result<Self, JetError> {
        if denom == 0 {
            return Err(JetError::DivisionByZero);
        }
        Ok(numer as f64 / denom as f64)
    }
    fn from_decimal(text: &str) -> Option<Self> {
        if !is_decimal_literal(text) {
            return None;
        }
        text.parse().ok()
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn checked_div(&self, rhs: &Self) -> Result<Self, JetError> {
        if *rhs == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        Ok(self / rhs)
    }
    fn exp(&self) -> Result<Self, JetError> {
        Ok(f64::exp(*self))
    }
    fn ln(&self) -> Result<Self, JetError> {
        if *self <= 0.0 {
            return Err(JetError::Domain { function: "ln", value: *self });
        }
        Ok(f64::ln(*self))
    }
    fn sin(&self) -> Result<Self, JetError> {
        Ok(f64::sin(*self))
    }
    fn cos(&self) -> Result<Self, JetError> {
        Ok(f64::cos(*self))
    }
    fn sqrt(&self) -> Result<Self, JetError> {
        if *self <= 0.0 {
            return Err(JetError::Domain { function: "sqrt", value: *self });
        }
        Ok(f64::sqrt(*self))
    }
}

fn is_decimal_literal(text: &str) -> bool {
    let mut parts = text.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next();
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    match frac {
        None => !int.is_empty() && digits(int),
        Some(f) => (!int.is_empty() || !f.is_empty()) && digits(int) && digits(f),
    }
}

impl Scalar for BigRational {
    const MODE: Mode = Mode::Rational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(numer: i64, denom: i64) -> Result<Self, JetError> {
        if denom == 0 {
            return Err(JetError::DivisionByZero);
        }
        Ok(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }
    fn from_decimal(text: &str) -> Option<Self> {
        if !is_decimal_literal(text) {
            return None;
        }
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        let digits = format!("{int}{frac}");
        let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let denom = num::pow(BigInt::from(10u32), frac.len());
        Some(BigRational::new(numer, denom))
    }
    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn checked_div(&self, rhs: &Self) -> Result<Self, JetError> {
        if Zero::is_zero(rhs) {
            return Err(JetError::DivisionByZero);
        }
        Ok(self / rhs)
    }
    fn exp(&self) -> Result<Self, JetError> {
        Err(JetError::Transcendental("exp"))
    }
    fn ln(&self) -> Result<Self, JetError> {
        Err(JetError::Transcendental("ln"))
    }
    fn sin(&self) -> Result<Self, JetError> {
        Err(JetError::Transcendental("sin"))
    }
    fn cos(&self) -> Result<Self, JetError> {
        Err(JetError::Transcendental("cos"))
    }
    fn sqrt(&self) -> Result<Self, JetError> {
        Err(JetError::Transcendental("sqrt"))
    }
}

/// Largest absolute value in a sequence, as a float for reporting.
pub fn max_abs<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> f64 {
    values.into_iter().map(|v| v.abs().to_f64()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::{JetError, Scalar};
    use num::BigRational;

    #[test]
    fn decimal_literals_are_exact_in_rational_mode() {
        let q = BigRational::from_decimal("0.1").unwrap();
        assert_eq!(q, BigRational::from_ratio(1, 10).unwrap());
        assert_eq!(BigRational::from_decimal("12").unwrap(), BigRational::from_i64(12));
        assert_eq!(BigRational::from_decimal("3.").unwrap(), BigRational::from_i64(3));
        assert!(BigRational::from_decimal("1e3").is_none());
        assert!(BigRational::from_decimal(".").is_none());
    }

    #[test]
    fn rational_division_by_zero_is_an_error() {
        let one = BigRational::one();
        assert_eq!(one.checked_div(&BigRational::zero()), Err(JetError::DivisionByZero));
        assert_eq!(1.0f64.checked_div(&0.0), Err(JetError::DivisionByZero));
    }

    #[test]
    fn rational_mode_refuses_transcendentals() {
        let q = BigRational::zero();
        assert_eq!(Scalar::exp(&q), Err(JetError::Transcendental("exp")));
        assert_eq!(Scalar::sqrt(&q), Err(JetError::Transcendental("sqrt")));
    }

    #[test]
    fn f64_roundtrips_through_rational() {
        let v = 0.3_f64;
        let q = BigRational::from_f64(v).unwrap();
        assert_eq!(Scalar::to_f64(&q), v);
    }
}
