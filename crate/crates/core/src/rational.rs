//! Exact nonnegative rationals.
//!
//! Every distance and radius in the crate is a [`Rational`]. Values are kept
//! in lowest terms by the underlying big-integer ratio, so structural
//! equality coincides with numeric equality and the derived order is the
//! order of ℚ.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn integer(n: u64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom` in lowest terms.
    ///
    /// Panics if `denom` is zero; use [`Rational::from_str`] for untrusted
    /// input.
    pub fn new(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Wraps a signed ratio, failing when it is negative.
    pub fn from_signed(value: BigRational) -> Option<Self> {
        if value.is_negative() {
            None
        } else {
            Some(Rational(value))
        }
    }

    pub fn from_naturals(numer: BigUint, denom: BigUint) -> Option<Self> {
        if denom.is_zero() {
            return None;
        }
        Some(Rational(BigRational::new(
            BigInt::from_biguint(Sign::Plus, numer),
            BigInt::from_biguint(Sign::Plus, denom),
        )))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_signed(&self) -> &BigRational {
        &self.0
    }

    pub fn into_signed(self) -> BigRational {
        self.0
    }

    /// `self - other`, or `None` when the difference would be negative.
    pub fn checked_sub(&self, other: &Rational) -> Option<Rational> {
        Rational::from_signed(&self.0 - &other.0)
    }

    pub fn pow(&self, exp: u32) -> Rational {
        Rational(Pow::pow(&self.0, exp))
    }

    /// The exact `n`-th root, if it is rational.
    pub fn checked_root(&self, n: u32) -> Option<Rational> {
        assert!(n > 0, "zeroth root");
        let num = self.0.numer().nth_root(n);
        let den = self.0.denom().nth_root(n);
        let candidate = BigRational::new(num, den);
        if Pow::pow(&candidate, n) == self.0 {
            Some(Rational(candidate))
        } else {
            None
        }
    }

    /// Whether this value is an integer.
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl Add for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Mul for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_natural(text: &str, whole: &str) -> Result<BigUint, Error> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(
            format!("`{whole}`"),
            "expected a nonnegative decimal integer or `p/q`",
        ));
    }
    Ok(text.parse().expect("digits only"))
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"n"` or `"p/q"` with decimal digits. Non-reduced fractions
    /// are normalized; signs and zero denominators are rejected.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.starts_with('-') {
            return Err(Error::parse(format!("`{s}`"), "negative values are not allowed"));
        }
        let (numer, denom) = match s.split_once('/') {
            Some((n, d)) => (parse_natural(n, s)?, parse_natural(d, s)?),
            None => (parse_natural(s, s)?, BigUint::one()),
        };
        Rational::from_naturals(numer, denom)
            .ok_or_else(|| Error::parse(format!("`{s}`"), "zero denominator"))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
