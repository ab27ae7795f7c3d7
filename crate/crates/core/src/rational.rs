//! Exact rationals and their text form (`"3/2"`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"1.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::parse("", format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(digits, scale));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical text form: `"5"` for integers, `"3/2"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `floor(r + 1/2)`: round half up.
pub fn round_half_up(r: &Rational) -> BigInt {
    (r + rat(1, 2)).floor().to_integer()
}

pub fn ceil(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

pub fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

/// `a / b` reduced, for nonnegative integers with `b > 0`.
pub fn ratio(a: u64, b: u64) -> Rational {
    let g = a.gcd(&b).max(1);
    Rational::new(BigInt::from(a / g), BigInt::from(b / g))
}

pub fn one() -> Rational {
    Rational::one()
}

pub mod serde_rational {
    //! Serde adapter storing rationals as `"p/q"` strings.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => parse_rational(&t).map_err(serde::de::Error::custom),
            Repr::Int(i) => Ok(int(i)),
        }
    }
}
