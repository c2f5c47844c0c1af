//! Exact rational helpers.
//!
//! `Rat` is a reduced big-integer rational. The canonical wire form is
//! `"p/q"` with q > 0 (emitted even when q = 1 so serialized artifacts are
//! uniform); parsing also accepts bare integers and finite decimals so CLI
//! configs can say `"0.37"`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = num_rational::BigRational;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

/// Small-integer constructor.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Canonical `"p/q"` form (reduced, positive denominator).
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `"p/q"`, a bare integer, or a finite decimal, exactly.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatError(s.to_string()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| ParseRatError(s.to_string()))?;
        let q: BigInt = q.trim().parse().map_err(|_| ParseRatError(s.to_string()))?;
        if q.is_zero() {
            return Err(ParseRatError(s.to_string()));
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let sign = if int_part.trim_start().starts_with('-') { -1 } else { 1 };
        let int_val: BigInt = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| ParseRatError(s.to_string()))?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRatError(s.to_string()));
        }
        let num: BigInt = frac_part.parse().unwrap();
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = Rat::new(num, den);
        let base = Rat::from_integer(int_val.abs());
        let total = base + frac;
        return Ok(if sign < 0 { -total } else { total });
    }
    let p: BigInt = s.parse().map_err(|_| ParseRatError(s.to_string()))?;
    Ok(Rat::from_integer(p))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Guard against huge numerators losing all precision: scale via f64 pair.
    let n = r.numer().to_f64().unwrap_or(f64::MAX);
    let d = r.denom().to_f64().unwrap_or(f64::MAX);
    n / d
}

/// Exact rational value of a finite f64 (binary expansion is exact).
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Floor of a rational as an i64 (panics outside the i64 range, which the
/// enumeration budget guards rule out).
pub fn rat_to_i64(r: &Rat) -> i64 {
    let f = r.floor();
    i64::try_from(f.numer()).expect("rational out of i64 range")
}

/// base^exp for non-negative integer exponents.
pub fn rat_pow(base: &Rat, exp: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Serde adapter: rationals as canonical `"p/q"` strings.
pub mod serde_rat {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}
