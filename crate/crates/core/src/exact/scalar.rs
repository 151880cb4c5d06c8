//! Rational and Gaussian-rational scalars, plus the small `Scalar` trait that
//! lets the numeric layer share code paths between exact and `f64` arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ExactError;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `p`, `p/q`, or a finite decimal such as `-0.25` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, ExactError> {
    let t = s.trim();
    let bad = || ExactError::Parse(format!("not a rational literal: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() && int_digits.is_empty() {
            return Err(bad());
        }
        if !int_digits.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac}");
        let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rat::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    BigInt::from_str(t).map(Rat::from_integer).map_err(|_| bad())
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators and denominators: fall back to a scaled quotient.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact `re + i*im` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gauss {
    pub re: Rat,
    pub im: Rat,
}

impl Gauss {
    pub fn new(re: Rat, im: Rat) -> Self {
        Gauss { re, im }
    }

    pub fn real(re: Rat) -> Self {
        Gauss { re, im: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Gauss::real(rat_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Gauss::real(rat(n, d))
    }

    pub fn zero() -> Self {
        Gauss { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn one() -> Self {
        Gauss::from_int(1)
    }

    pub fn i() -> Self {
        Gauss { re: Rat::zero(), im: Rat::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gauss { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn mul_i(&self) -> Self {
        Gauss { re: -self.im.clone(), im: self.re.clone() }
    }

    pub fn checked_div(&self, rhs: &Gauss) -> Result<Gauss, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let n = rhs.norm_sqr();
        let num = self * &rhs.conj();
        Ok(Gauss { re: num.re / &n, im: num.im / n })
    }

    pub fn inv(&self) -> Result<Gauss, ExactError> {
        Gauss::one().checked_div(self)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Integer power, negative exponents allowed for nonzero bases.
    pub fn pow(&self, e: i64) -> Result<Gauss, ExactError> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = Gauss::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Ok(acc)
    }
}

fn fmt_rat(r: &Rat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_rat(&self.re, f),
            (true, false) => fmt_imag(&self.im, f),
            (false, false) => {
                write!(f, "(")?;
                fmt_rat(&self.re, f)?;
                if self.im.is_positive() {
                    write!(f, "+")?;
                }
                fmt_imag(&self.im, f)?;
                write!(f, ")")
            }
        }
    }
}

fn fmt_imag(im: &Rat, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if im.is_one() {
        write!(f, "i")
    } else if (-im).is_one() {
        write!(f, "-i")
    } else if im.is_integer() {
        write!(f, "{}i", im.numer())
    } else {
        write!(f, "{}/{}i", im.numer(), im.denom())
    }
}

impl fmt::Debug for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Rat> for Gauss {
    fn from(r: Rat) -> Self {
        Gauss::real(r)
    }
}

impl From<i64> for Gauss {
    fn from(n: i64) -> Self {
        Gauss::from_int(n)
    }
}

macro_rules! gauss_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Gauss> for &Gauss {
            type Output = Gauss;
            fn $m(self, rhs: &Gauss) -> Gauss {
                let f: fn(&Gauss, &Gauss) -> Gauss = $body;
                f(self, rhs)
            }
        }
        impl $tr<Gauss> for Gauss {
            type Output = Gauss;
            fn $m(self, rhs: Gauss) -> Gauss {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Gauss> for Gauss {
            type Output = Gauss;
            fn $m(self, rhs: &Gauss) -> Gauss {
                (&self).$m(rhs)
            }
        }
        impl $tr<Gauss> for &Gauss {
            type Output = Gauss;
            fn $m(self, rhs: Gauss) -> Gauss {
                self.$m(&rhs)
            }
        }
    };
}

gauss_binop!(Add, add, |a, b| Gauss { re: &a.re + &b.re, im: &a.im + &b.im });
gauss_binop!(Sub, sub, |a, b| Gauss { re: &a.re - &b.re, im: &a.im - &b.im });
gauss_binop!(Mul, mul, |a, b| {
    if a.im.is_zero() && b.im.is_zero() {
        return Gauss::real(&a.re * &b.re);
    }
    Gauss { re: &a.re * &b.re - &a.im * &b.im, im: &a.re * &b.im + &a.im * &b.re }
});
gauss_binop!(Div, div, |a, b| a.checked_div(b).expect("division by zero Gaussian rational"));

impl Neg for Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re, im: -self.im }
    }
}

impl Neg for &Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&Gauss> for Gauss {
    fn add_assign(&mut self, rhs: &Gauss) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Gauss> for Gauss {
    fn sub_assign(&mut self, rhs: &Gauss) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Gauss> for Gauss {
    fn mul_assign(&mut self, rhs: &Gauss) {
        *self = &*self * rhs;
    }
}

impl Mul<&Rat> for &Gauss {
    type Output = Gauss;
    fn mul(self, rhs: &Rat) -> Gauss {
        Gauss { re: &self.re * rhs, im: &self.im * rhs }
    }
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// JSON form of a rational: a `"p/q"` string (`"p"` for integers). Integer and
/// decimal JSON numbers are accepted on input.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_rat(&v).map_err(serde::de::Error::custom)
    }
}

pub fn value_to_rat(v: &serde_json::Value) -> Result<Rat, ExactError> {
    match v {
        serde_json::Value::String(s) => parse_rat(s),
        serde_json::Value::Number(n) => parse_rat(&n.to_string()),
        other => Err(ExactError::Parse(format!("expected rational, found {other}"))),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussJson {
    #[serde(with = "rat_serde")]
    re: Rat,
    #[serde(with = "rat_serde")]
    im: Rat,
}

impl Serialize for Gauss {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GaussJson { re: self.re.clone(), im: self.im.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gauss {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Gauss, D::Error> {
        let g = GaussJson::deserialize(d)?;
        Ok(Gauss { re: g.re, im: g.im })
    }
}

/// Field operations shared by the exact and floating-point code paths.
pub trait Scalar:
    Clone + fmt::Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_gauss(g: &Gauss) -> Self;
    fn conj(&self) -> Self;
    /// Exact zero for Gaussian rationals, bitwise zero for floats.
    fn is_zero(&self) -> bool;
    fn divide(&self, rhs: &Self) -> Self;
    /// Positive real number; floats use the pivot tolerance.
    fn is_positive_real(&self, tol: f64) -> bool;
    /// Zero within tolerance (exact for Gaussian rationals).
    fn is_negligible(&self, tol: f64) -> bool;
    fn to_c64(&self) -> Complex64;
    fn im_part(&self) -> Self;
    /// Float value as a scalar; `None` for exact types.
    fn from_c64(z: Complex64) -> Option<Self>;
}

impl Scalar for Gauss {
    fn from_c64(_: Complex64) -> Option<Self> {
        None
    }
    fn zero() -> Self {
        Gauss::zero()
    }
    fn one() -> Self {
        Gauss::one()
    }
    fn i() -> Self {
        Gauss::i()
    }
    fn from_gauss(g: &Gauss) -> Self {
        g.clone()
    }
    fn conj(&self) -> Self {
        Gauss::conj(self)
    }
    fn is_zero(&self) -> bool {
        Gauss::is_zero(self)
    }
    fn divide(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn is_positive_real(&self, _tol: f64) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        Gauss::is_zero(self)
    }
    fn to_c64(&self) -> Complex64 {
        Gauss::to_c64(self)
    }
    fn im_part(&self) -> Self {
        Gauss::real(self.im.clone())
    }
}

impl Scalar for Complex64 {
    fn from_c64(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_gauss(g: &Gauss) -> Self {
        g.to_c64()
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn divide(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn is_positive_real(&self, tol: f64) -> bool {
        self.re > tol && self.im.abs() <= tol.max(1e-9 * self.re.abs())
    }
    fn is_negligible(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn im_part(&self) -> Self {
        Complex64::new(self.im, 0.0)
    }
}
