//! Exact rationals and the extended line `Q ∪ {+∞}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational number used for coefficients, exponents and areas.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational `{0}` (expected `p`, `p/q` or a finite decimal)")]
pub struct ParseRationalError(pub String);

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-0.75"` exactly.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let s = s.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num.trim()).ok_or_else(err)?;
        let den = parse_int(den.trim()).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() && whole_digits.is_empty() {
            return Err(err());
        }
        let whole_val = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            parse_int(whole_digits).ok_or_else(err)?
        };
        let frac_val = if frac.is_empty() {
            BigInt::zero()
        } else {
            parse_int(frac).ok_or_else(err)?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = Q::new(whole_val * &scale + frac_val, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    parse_int(s).map(Q::from_integer).ok_or_else(err)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Canonical `"p/q"` rendering (`"p"` for integers).
pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses a comma-separated list of rationals, e.g. `"3/4,2,2"`.
pub fn parse_q_list(s: &str) -> Result<Vec<Q>, ParseRationalError> {
    s.split(',').map(parse_q).collect()
}

/// Serde adapter storing a [`Q`] as its `"p/q"` string.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = StringOrInt::deserialize(d)?;
        raw.into_q().map_err(serde::de::Error::custom)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum StringOrInt {
        Str(String),
        Int(i64),
    }

    impl StringOrInt {
        pub(crate) fn into_q(self) -> Result<Q, ParseRationalError> {
            match self {
                StringOrInt::Str(s) => parse_q(&s),
                StringOrInt::Int(i) => Ok(qi(i)),
            }
        }
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&fmt_q(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw = Vec::<serde_q::StringOrInt>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_q().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// An element of `Q ∪ {+∞}`: valuations, truncation levels and thresholds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Q),
    Infinity,
}

/// The valuation of a Novikov element; `+∞` for zero.
pub type Valuation = Extended;

impl Extended {
    pub fn finite(q: Q) -> Self {
        Extended::Finite(q)
    }

    pub fn zero() -> Self {
        Extended::Finite(Q::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Q> {
        match self {
            Extended::Finite(q) => Some(q),
            Extended::Infinity => None,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Subtracts a finite amount; `+∞` stays `+∞`.
    pub fn sub_q(&self, q: &Q) -> Self {
        match self {
            Extended::Finite(v) => Extended::Finite(v - q),
            Extended::Infinity => Extended::Infinity,
        }
    }

    pub fn add_q(&self, q: &Q) -> Self {
        match self {
            Extended::Finite(v) => Extended::Finite(v + q),
            Extended::Infinity => Extended::Infinity,
        }
    }

    /// `true` when a finite value `q` lies strictly below `self`.
    pub fn exceeds(&self, q: &Q) -> bool {
        match self {
            Extended::Finite(v) => q < v,
            Extended::Infinity => true,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(q) => q_to_f64(q),
            Extended::Infinity => f64::INFINITY,
        }
    }

    /// `"p/q"`, or `"inf"` for `+∞`.
    pub fn render(&self) -> String {
        match self {
            Extended::Finite(q) => fmt_q(q),
            Extended::Infinity => "inf".to_string(),
        }
    }
}

impl From<Q> for Extended {
    fn from(q: Q) -> Self {
        Extended::Finite(q)
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Infinity, Extended::Infinity) => Ordering::Equal,
            (Extended::Infinity, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Finite(_), Extended::Infinity) => Ordering::Less,
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for &Extended {
    type Output = Extended;

    fn add(self, rhs: &Extended) -> Extended {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinity,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for Extended {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(Extended::Infinity),
            other => parse_q(other).map(Extended::Finite),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Greatest common divisor of a slice of integers (0 for an all-zero slice).
pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_q("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_q("-6/8").unwrap(), q(-3, 4));
        assert_eq!(parse_q("5").unwrap(), qi(5));
        assert_eq!(parse_q("0.75").unwrap(), q(3, 4));
        assert_eq!(parse_q("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_q(".5").unwrap(), q(1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("").is_err());
        assert!(parse_q("1e3").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(fmt_q(&q(6, 8)), "3/4");
        assert_eq!(fmt_q(&qi(-2)), "-2");
        assert_eq!(Extended::Infinity.render(), "inf");
    }

    #[test]
    fn extended_order_puts_infinity_last() {
        let mut v = [Extended::Infinity, Extended::Finite(qi(2)), Extended::Finite(q(1, 2))];
        v.sort();
        assert_eq!(v[0], Extended::Finite(q(1, 2)));
        assert_eq!(v[2], Extended::Infinity);
        assert_eq!("inf".parse::<Extended>().unwrap(), Extended::Infinity);
    }
}
