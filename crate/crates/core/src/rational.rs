//! Exact nonnegative rational arithmetic, dyadic bit extraction, and closed
//! subintervals of `[0,1]`.
//!
//! Everything downstream (halting masses, covering lengths, certified omega
//! bits) is built on [`Rational`]; there is no floating point in the crate.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("malformed rational literal {0:?} (expected \"num\" or \"num/den\")")]
    Malformed(String),
    #[error("value {0} is outside [0, 1)")]
    OutOfUnitRange(String),
    #[error("subtraction would go negative: {0} - {1}")]
    NegativeResult(String, String),
}

/// An exact nonnegative fraction, always kept in lowest terms.
///
/// Serializes as the string `"num/den"` (`"65/256"`, `"0/1"`) in JSON.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<BigUint>);

impl Rational {
    pub fn new(numerator: impl Into<BigUint>, denominator: impl Into<BigUint>) -> Result<Self, RationalError> {
        let den = denominator.into();
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        Ok(Rational(Ratio::new(numerator.into(), den)))
    }

    pub fn zero() -> Self {
        Rational(Ratio::zero())
    }

    pub fn one() -> Self {
        Rational(Ratio::one())
    }

    pub fn from_integer(n: u64) -> Self {
        Rational(Ratio::from_integer(BigUint::from(n)))
    }

    /// 2^-k, the mass of a k-bit string under the uniform coin measure.
    pub fn pow2_neg(k: u64) -> Self {
        Rational(Ratio::new(BigUint::one(), BigUint::one() << k))
    }

    /// 10^-k, the width of a k-digit decimal truncation.
    pub fn pow10_neg(k: u64) -> Self {
        Rational(Ratio::new(BigUint::one(), BigUint::from(10u32).pow(k as u32)))
    }

    pub fn numerator(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn compare(&self, other: &Rational) -> Ordering {
        self.cmp(other)
    }

    /// Exact difference; errors instead of wrapping when `other > self`.
    pub fn checked_sub(&self, other: &Rational) -> Result<Rational, RationalError> {
        if other > self {
            return Err(RationalError::NegativeResult(self.to_string(), other.to_string()));
        }
        Ok(Rational(&self.0 - &other.0))
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        Rational(&self.0 * &other.0)
    }

    /// Self-multiplication `k` times; `pow(0)` is 1.
    pub fn pow(&self, k: u32) -> Rational {
        Rational(Ratio::new(
            self.0.numer().pow(k),
            self.0.denom().pow(k),
        ))
    }

    pub fn half(&self) -> Rational {
        Rational(&self.0 / Ratio::from_integer(BigUint::from(2u32)))
    }

    pub fn min(self, other: Rational) -> Rational {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// The n-th bit (1-based) after the binary point, taking the terminating
    /// expansion for dyadic values so the function is total on `[0,1)`.
    ///
    /// `bit_at(1/2, 1) = 1`, `bit_at(1/2, 2) = 0`, and `1/3` alternates
    /// `0,1,0,1,...`.
    pub fn bit_at(&self, n: u64) -> Result<bool, RationalError> {
        if self.0 >= Ratio::one() {
            return Err(RationalError::OutOfUnitRange(self.to_string()));
        }
        assert!(n >= 1, "bit positions are 1-based");
        // floor(x * 2^n) mod 2
        let shifted = (self.0.numer() << n) / self.0.denom();
        Ok(shifted.bit(0))
    }

    /// First `n` bits of the binary expansion as a [`BitString`]
    /// (terminating expansion for dyadic values).
    pub fn first_bits(&self, n: u64) -> Result<BitString, RationalError> {
        let mut bits = BitString::empty();
        for k in 1..=n {
            bits.push(self.bit_at(k)?);
        }
        Ok(bits)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl fmt::Display for Rational {
    /// Always the two-part `num/den` form, even for integers: `"0/1"`, `"1/1"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    /// Accepts `"num/den"` or a bare integer `"num"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || RationalError::Malformed(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num: BigUint = num.trim().parse().map_err(|_| malformed())?;
        let den: BigUint = den.trim().parse().map_err(|_| malformed())?;
        Rational::new(num, den)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A finite sequence of bits; program encodings, omega prefixes and binary
/// expansions all live here.  Serializes as a string of `'0'`/`'1'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    pub fn len(&self) -> u64 {
        self.bits.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// 1-based access, matching the enumeration and expansion conventions.
    pub fn bit(&self, n: u64) -> bool {
        self.bits[(n - 1) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        self.bits.len() <= other.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    /// Value of the string read as a binary fraction: sum of `bits[i] * 2^-i`.
    ///
    /// `""` is 0, `"101"` is 5/8.  Every n-bit string lands in `[0, 1 - 2^-n]`.
    pub fn dyadic_value(&self) -> Rational {
        let mut numer = BigUint::zero();
        for bit in &self.bits {
            numer <<= 1;
            if *bit {
                numer |= BigUint::one();
            }
        }
        if self.bits.is_empty() {
            return Rational::zero();
        }
        Rational(Ratio::new(numer, BigUint::one() << self.bits.len()))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in &self.bits {
            f.write_str(if *bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bit strings may only contain '0' and '1', got {0:?}")]
pub struct BitStringParseError(pub String);

impl FromStr for BitString {
    type Err = BitStringParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(BitStringParseError(s.to_string())),
            }
        }
        Ok(BitString { bits })
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A closed interval inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid interval [{lo}, {hi}]: need 0 <= lo <= hi <= 1")]
pub struct IntervalError {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, IntervalError> {
        if lo > hi || hi > Rational::one() {
            return Err(IntervalError { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> Rational {
        self.hi.checked_sub(&self.lo).expect("interval invariant lo <= hi")
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}
