//! Exact rational scalars and their text encoding.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The scalar field used throughout: arbitrary-precision rationals.
pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error("malformed rational {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("decimal value {0:?} rejected; pass a float precision to accept decimals")]
    DecimalRejected(String),
}

/// How decimal input is treated when parsing weights and matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FloatPolicy {
    /// Only `p`, `p/q` are accepted.
    #[default]
    Reject,
    /// Decimals are accepted and rounded to the given number of significant
    /// decimal digits before conversion to an exact rational.
    Round { digits: u32 },
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"p/q"`, and (under [`FloatPolicy::Round`]) decimal strings.
pub fn parse_q(text: &str, policy: FloatPolicy) -> Result<Q, RationalError> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| RationalError::Malformed(t.into()))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| RationalError::Malformed(t.into()))?;
        if d.is_zero() {
            return Err(RationalError::ZeroDenominator(t.into()));
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(t) {
        return Ok(Q::from_integer(n));
    }
    let x: f64 = t.parse().map_err(|_| RationalError::Malformed(t.into()))?;
    match policy {
        FloatPolicy::Reject => Err(RationalError::DecimalRejected(t.into())),
        FloatPolicy::Round { digits } => round_f64(x, digits).ok_or_else(|| RationalError::Malformed(t.into())),
    }
}

/// Rounds `x` to `digits` significant decimal digits and returns it exactly.
pub fn round_f64(x: f64, digits: u32) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1) as usize, x);
    let (mant, exp) = s.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let neg = mant.starts_with('-');
    let digits_str: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let frac_len = mant.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    let mut m = BigInt::from_str(&digits_str).ok()?;
    if neg {
        m = -m;
    }
    let shift = exp - frac_len;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        Q::from_integer(m * num_traits::pow(ten, shift as usize))
    } else {
        Q::new(m, num_traits::pow(ten, (-shift) as usize))
    })
}

/// `"p/q"` or `"p"` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact square root of a nonnegative rational, if it has one.
pub fn sqrt_exact(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Q::new(n, d))
}

/// Writes `x = c^2 * r` with `r` a squarefree positive integer, when the
/// factorisation is cheap (trial division up to 10^6 on numerator and
/// denominator). Returns `(c, r)`.
pub fn square_decompose(x: &Q) -> Option<(Q, BigInt)> {
    if !x.is_positive() {
        return None;
    }
    // x = n/d = n*d / d^2
    let nd = x.numer() * x.denom();
    let (sq, free) = split_square(&nd)?;
    Some((Q::new(sq, x.denom().clone()), free))
}

fn split_square(n: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut rest = n.clone();
    let mut sq = BigInt::one();
    let mut free = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &p * &p <= rest {
        if p > limit {
            return None;
        }
        let mut k = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            k += 1;
        }
        for _ in 0..k / 2 {
            sq *= &p;
        }
        if k % 2 == 1 {
            free *= &p;
        }
        p += 1;
    }
    free *= rest;
    Some((sq, free))
}

pub mod serde_q {
    //! Serde adapter storing a rational as its `"p/q"` string.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s, FloatPolicy::Reject).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&fmt_q(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse_q(&s, FloatPolicy::Reject).map_err(serde::de::Error::custom)).transpose()
    }
}

pub mod serde_q_map {
    use super::*;
    use serde::ser::SerializeMap;
    use serde::Serializer;
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Q>, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &fmt_q(v))?;
        }
        map.end()
    }
}

pub mod serde_q_matrix {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(m: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|row| row.iter().map(fmt_q).collect::<Vec<_>>()))
    }
}
