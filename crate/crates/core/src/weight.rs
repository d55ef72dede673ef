//! Exact nonnegative weights: arbitrary-precision rationals extended with `+∞`.
//!
//! Cocycle values are always finite positive rationals; masses (sums of
//! cocycle values over infinite sets) may be certified infinite. Rationals are
//! rendered as `"num/den"` strings everywhere they leave the library.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational `{0}` (expected `num/den` or an integer)")]
pub struct ParseRationalError(pub String);

/// Parses `"num/den"`, `"n"` (integer) into an exact rational.
pub fn parse_ratio(s: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num = BigInt::from_str(n).map_err(|_| err())?;
    let den = BigInt::from_str(d).map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `"num/den"` (always with a denominator).
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Nearest `f64` to the rational (saturating to `±inf` outside the double range).
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Base-2 logarithm of a positive rational, accurate to double precision even
/// when the value itself is far outside the `f64` range.
pub fn ratio_log2(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "log2 of a non-positive rational");
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    // Shift both to ~60 significant bits before converting.
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (r.numer() >> shift_n as usize).to_f64().unwrap();
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap();
    n.log2() - d.log2() + (shift_n - shift_d) as f64
}

pub fn ratio_pow(base: &BigRational, exp: i64) -> BigRational {
    let base = if exp >= 0 { base.clone() } else { base.recip() };
    let e = u32::try_from(exp.unsigned_abs()).expect("exponent fits in u32");
    // a reduced fraction stays reduced under powers
    BigRational::new_raw(base.numer().pow(e), base.denom().pow(e))
}

pub fn ratio_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// An exact nonnegative rational or `+∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Weight {
    Finite(BigRational),
    Infinite,
}

impl Weight {
    pub fn zero() -> Self {
        Weight::Finite(BigRational::zero())
    }

    pub fn one() -> Self {
        Weight::Finite(BigRational::one())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Weight::Infinite)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Weight::Finite(r) if r.is_zero())
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Weight::Finite(r) => Some(r),
            Weight::Infinite => None,
        }
    }

    /// `1/w` with `1/0 = ∞` and `1/∞ = 0`.
    pub fn recip(&self) -> Weight {
        match self {
            Weight::Infinite => Weight::zero(),
            Weight::Finite(r) if r.is_zero() => Weight::Infinite,
            Weight::Finite(r) => Weight::Finite(r.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Finite(r) => ratio_to_f64(r),
            Weight::Infinite => f64::INFINITY,
        }
    }
}

impl From<BigRational> for Weight {
    fn from(r: BigRational) -> Self {
        debug_assert!(!r.is_negative());
        Weight::Finite(r)
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Weight::Infinite, Weight::Infinite) => Ordering::Equal,
            (Weight::Infinite, _) => Ordering::Greater,
            (_, Weight::Infinite) => Ordering::Less,
            (Weight::Finite(a), Weight::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        match (self, rhs) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a + b),
            _ => Weight::Infinite,
        }
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        &self + &rhs
    }
}

/// Measure-theoretic convention: `0 · ∞ = 0`.
impl Mul for &Weight {
    type Output = Weight;
    fn mul(self, rhs: &Weight) -> Weight {
        match (self, rhs) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a * b),
            (w, Weight::Infinite) | (Weight::Infinite, w) => {
                if w.is_zero() {
                    Weight::zero()
                } else {
                    Weight::Infinite
                }
            }
        }
    }
}

impl Mul for Weight {
    type Output = Weight;
    fn mul(self, rhs: Weight) -> Weight {
        &self * &rhs
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(r) => f.write_str(&ratio_string(r)),
            Weight::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Weight {
    type Err = ParseRationalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "∞" => Ok(Weight::Infinite),
            t => {
                let r = parse_ratio(t)?;
                if r.is_negative() {
                    return Err(ParseRationalError(s.to_string()));
                }
                Ok(Weight::Finite(r))
            }
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `BigRational` fields as `"num/den"` strings.
pub mod serde_ratio {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ratio_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_ratio(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Option<BigRational>`; use with `#[serde(default)]`.
pub mod serde_opt_ratio {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&ratio_string(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_ratio(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for `Vec<BigRational>`.
pub mod serde_ratio_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&ratio_string(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_ratio(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
