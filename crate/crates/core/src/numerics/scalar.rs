//! Scalar backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two backends are
//! provided: exact arbitrary-precision rationals ([`Rational`]) and `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational. Always kept in lowest terms with a positive
/// denominator by `num-rational`.
pub type Rational = BigRational;

/// Absolute/relative tolerance used by the float backend for equality checks.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Rational,
    Float,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::Float => "float",
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
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact rational value. `None` only for non-finite floats.
    fn to_rational(&self) -> Option<Rational>;
    fn to_f64(&self) -> f64;

    /// Whether `self` and `other` agree: exactly for rationals, within
    /// [`FLOAT_TOLERANCE`] (absolute plus relative) for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Whether a pivot of this size should be treated as zero, given the
    /// magnitude `scale` of the matrix being eliminated.
    fn is_negligible(&self, scale: f64) -> bool;

    /// Pivot preference: larger is better. Exact elimination takes any
    /// nonzero pivot; floats use partial pivoting on magnitude.
    fn pivot_score(&self) -> f64;

    /// `ceil(self * 2^64)` clamped to `[0, 2^64]`. Used to compare a
    /// uniform 64-bit draw `k / 2^64` against a cumulative probability
    /// without leaving integer arithmetic.
    fn unit_threshold(&self) -> u128;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn is_exact() -> bool {
        Self::BACKEND == Backend::Rational
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn abs_value(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn power(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        Zero::is_zero(self)
    }
    fn pivot_score(&self) -> f64 {
        if Zero::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn unit_threshold(&self) -> u128 {
        rational_unit_threshold(self)
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> Option<Rational> {
        Rational::from_float(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn approx_eq(&self, other: &Self) -> bool {
        let scale = 1.0 + f64::abs(*self).max(f64::abs(*other));
        (self - other).abs() <= FLOAT_TOLERANCE * scale
    }
    fn is_negligible(&self, scale: f64) -> bool {
        f64::abs(*self) <= 1e-13 * scale.max(f64::MIN_POSITIVE)
    }
    fn pivot_score(&self) -> f64 {
        f64::abs(*self)
    }
    fn unit_threshold(&self) -> u128 {
        match Rational::from_float(*self) {
            Some(r) => rational_unit_threshold(&r),
            None if *self > 0.0 => 1u128 << 64,
            None => 0,
        }
    }
}

fn rational_unit_threshold(r: &Rational) -> u128 {
    if !Signed::is_positive(r) {
        return 0;
    }
    if *r >= <Rational as One>::one() {
        return 1u128 << 64;
    }
    let scaled = r * Rational::from_integer(BigInt::one() << 64u32);
    let c = scaled.ceil().to_integer();
    c.to_u128().unwrap_or(1u128 << 64)
}

/// Parse `p/q`, an integer, or a decimal such as `0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part, exp) = split_decimal(body)?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mantissa = BigInt::from_str(&digits).ok()?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Some(value)
}

fn split_decimal(body: &str) -> Option<(&str, &str, i64)> {
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    Some((int_part, frac_part, exp))
}

/// Canonical text for a rational: `p/q`, or `p` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Text for a scalar: `p/q` for rationals, shortest round-trip decimal for
/// floats.
pub fn format_scalar<S: Scalar>(v: &S) -> String {
    match v.to_rational() {
        Some(r) if S::is_exact() => format_rational(&r),
        _ => format!("{}", v.to_f64()),
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// found from the continued-fraction convergents; returns the first
/// convergent within `tol` of `x`.
pub fn rational_approximation(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut rem = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    for _ in 0..64 {
        let a = rem.floor();
        let ai = BigInt::from(a as u64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > BigInt::from(max_den) {
            return None;
        }
        let approx = Rational::new(p2.clone() * sign, q2.clone());
        if f64::abs(ToPrimitive::to_f64(&approx).unwrap_or(f64::NAN) - x) <= tol {
            return Some(approx);
        }
        let frac = rem - a;
        if frac <= 0.0 {
            return Some(approx);
        }
        rem = 1.0 / frac;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    None
}
