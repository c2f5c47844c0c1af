//! Fixed-point extended-precision reals.
//!
//! A [`Real`] is an integer multiple of 10^-40, stored as a big-integer
//! mantissa. Forty fractional decimal digits give well over thirty
//! significant digits for every magnitude this crate touches (coordinates up
//! to ~10^6, star values in [0,1)). Addition, subtraction, negation and
//! multiplication by machine integers are *exact*; products and quotients of
//! two `Real`s round half-to-even at the last digit. Every `Real` is an exact
//! rational m/10^40, so comparisons against rational interval endpoints are
//! decidable — no epsilon is hidden inside the arithmetic itself.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::rat::Rat;

/// Number of fractional decimal digits carried by every [`Real`].
pub const DECIMAL_DIGITS: u32 = 40;

fn scale() -> &'static BigInt {
    static SCALE: OnceLock<BigInt> = OnceLock::new();
    SCALE.get_or_init(|| BigInt::from(10u32).pow(DECIMAL_DIGITS))
}

fn scale_sq() -> &'static BigInt {
    static SCALE_SQ: OnceLock<BigInt> = OnceLock::new();
    SCALE_SQ.get_or_init(|| scale() * scale())
}

/// Divide with round-half-to-even, the single deterministic rounding used by
/// all inexact `Real` operations.
fn div_round_half_even(num: &BigInt, den: &BigInt) -> BigInt {
    debug_assert!(den.is_positive());
    let (mut q, r) = num.div_mod_floor(den); // r in [0, den)
    let twice = &r * 2u32;
    match twice.cmp(den) {
        Ordering::Greater => q += 1,
        Ordering::Equal => {
            if q.is_odd() {
                q += 1;
            }
        }
        Ordering::Less => {}
    }
    q
}

/// Fixed-point real with 40 fractional decimal digits.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Real {
    m: BigInt,
}

/// Errors from parsing decimal strings or named constants.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseRealError {
    #[error("empty numeric entry")]
    Empty,
    #[error("invalid decimal literal {0:?}")]
    Invalid(String),
}

impl Real {
    pub fn zero() -> Self {
        Real { m: BigInt::zero() }
    }

    pub fn one() -> Self {
        Real { m: scale().clone() }
    }

    pub fn from_int(v: i64) -> Self {
        Real {
            m: BigInt::from(v) * scale(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real { m: self.m.abs() }
    }

    /// Exact product with a machine integer.
    pub fn mul_int(&self, k: i64) -> Self {
        Real { m: &self.m * k }
    }

    /// Exact product with a big integer.
    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        Real { m: &self.m * k }
    }

    /// Rounded product (half-to-even at the last digit).
    pub fn mul(&self, rhs: &Real) -> Self {
        Real {
            m: div_round_half_even(&(&self.m * &rhs.m), scale()),
        }
    }

    /// Rounded quotient (half-to-even at the last digit). Panics on zero
    /// divisor; callers validate.
    pub fn div(&self, rhs: &Real) -> Self {
        assert!(!rhs.is_zero(), "division of Real by zero");
        let num = &self.m * scale();
        let (num, den) = if rhs.m.is_negative() {
            (-num, -rhs.m.clone())
        } else {
            (num, rhs.m.clone())
        };
        Real {
            m: div_round_half_even(&num, &den),
        }
    }

    /// Largest integer ≤ self, as a big integer. Exact.
    pub fn floor_int(&self) -> BigInt {
        self.m.div_floor(scale())
    }

    /// Fractional part in [0, 1). Exact.
    pub fn frac(&self) -> Self {
        Real {
            m: self.m.mod_floor(scale()),
        }
    }

    /// Exact rational value m / 10^40 (reduced).
    pub fn to_rat(&self) -> Rat {
        Rat::new(self.m.clone(), scale().clone())
    }

    /// Nearest representable value to a rational (half-to-even).
    pub fn from_rat(r: &Rat) -> Self {
        let num = r.numer() * scale();
        let den = r.denom().clone();
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        };
        Real {
            m: div_round_half_even(&num, &den),
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Split to keep precision for large mantissas: integer part exactly,
        // fractional part from the 40-digit remainder.
        let (q, r) = self.m.div_mod_floor(scale());
        let qf = q.to_f64().unwrap_or(f64::MAX);
        let rf = r.to_f64().unwrap_or(0.0) / 1e40;
        qf + rf
    }

    /// √k rounded to the grid (half-adjusted floor of the integer square
    /// root), for small non-negative integers k.
    fn sqrt_int(k: u32) -> Self {
        let target = BigInt::from(k) * scale_sq();
        let s = target.sqrt(); // floor sqrt
        // Round to nearest representable: compare (s+1)^2 distance.
        let s1 = &s + 1;
        let m = if &s1 * &s1 - &target < &target - &s * &s {
            s1
        } else {
            s
        };
        Real { m }
    }

    /// Golden ratio (1+√5)/2.
    pub fn tau() -> Self {
        let num = scale() + Self::sqrt_int(5).m;
        Real {
            m: div_round_half_even(&num, &BigInt::from(2)),
        }
    }

    /// √2 − 1.
    pub fn sqrt2m1() -> Self {
        Real {
            m: Self::sqrt_int(2).m - scale(),
        }
    }

    /// Parse a plain decimal literal (optional sign, digits, optional
    /// fractional part). More than 40 fractional digits round half-to-even.
    pub fn parse_decimal(s: &str) -> Result<Self, ParseRealError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRealError::Empty);
        }
        let (neg, body) = match s.as_bytes()[0] {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let mut parts = body.splitn(2, '.');
        let int_part = parts.next().unwrap_or("");
        let frac_part = parts.next().unwrap_or("");
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseRealError::Invalid(s.to_string()));
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(ParseRealError::Invalid(s.to_string()));
        }
        let int_val: BigInt = if int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| ParseRealError::Invalid(s.to_string()))?
        };
        let digits = DECIMAL_DIGITS as usize;
        let mut m = int_val * scale();
        if !frac_part.is_empty() {
            if frac_part.len() <= digits {
                let frac_val: BigInt = frac_part.parse().unwrap();
                m += frac_val * BigInt::from(10u32).pow((digits - frac_part.len()) as u32);
            } else {
                let head: BigInt = frac_part[..digits].parse().unwrap();
                let tail = &frac_part[digits..];
                let tail_val: BigInt = tail.parse().unwrap();
                let tail_den = BigInt::from(10u32).pow(tail.len() as u32);
                let mut add = head;
                // round half-to-even on the tail
                let twice = &tail_val * 2u32;
                match twice.cmp(&tail_den) {
                    Ordering::Greater => add += 1,
                    Ordering::Equal => {
                        if add.is_odd() {
                            add += 1;
                        }
                    }
                    Ordering::Less => {}
                }
                m += add;
            }
        }
        Ok(Real {
            m: if neg { -m } else { m },
        })
    }

    /// Resolve a matrix entry: a decimal literal or one of the named
    /// constants `tau` ((1+√5)/2) and `sqrt2m1` (√2−1).
    pub fn resolve_entry(s: &str) -> Result<Self, ParseRealError> {
        match s.trim() {
            "tau" => Ok(Self::tau()),
            "sqrt2m1" => Ok(Self::sqrt2m1()),
            other => Self::parse_decimal(other),
        }
    }
}

impl fmt::Display for Real {
    /// Canonical decimal form: sign, integer part, and the 40 fractional
    /// digits with trailing zeros trimmed. Round-trips exactly through
    /// [`Real::parse_decimal`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.m.is_negative();
        let abs = self.m.abs();
        let (q, r) = abs.div_mod_floor(scale());
        let mut frac = format!("{:0>width$}", r.to_string(), width = DECIMAL_DIGITS as usize);
        while frac.ends_with('0') {
            frac.pop();
        }
        let sign = if neg { "-" } else { "" };
        if frac.is_empty() {
            write!(f, "{sign}{q}")
        } else {
            write!(f, "{sign}{q}.{frac}")
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({self})")
    }
}

impl FromStr for Real {
    type Err = ParseRealError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_decimal(s)
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        Real { m: &self.m + &rhs.m }
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        Real { m: &self.m - &rhs.m }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { m: -&self.m }
    }
}

impl serde::Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Real {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Real::parse_decimal(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["0", "1", "-1", "0.5", "-0.25", "17.0000000001", "3"] {
            let r = Real::parse_decimal(s).unwrap();
            let back = Real::parse_decimal(&r.to_string()).unwrap();
            assert_eq!(r, back, "{s}");
        }
        assert_eq!(Real::parse_decimal("0.50").unwrap().to_string(), "0.5");
        assert!(Real::parse_decimal("").is_err());
        assert!(Real::parse_decimal("1.2.3").is_err());
        assert!(Real::parse_decimal("x").is_err());
    }

    #[test]
    fn named_constants_match_known_digits() {
        // Reference digits of (1+√5)/2 and √2−1.
        let tau = Real::tau().to_string();
        assert!(tau.starts_with("1.6180339887498948482045868343656381177203"), "{tau}");
        let a = Real::sqrt2m1().to_string();
        assert!(a.starts_with("0.4142135623730950488016887242096980785697"), "{a}");
    }

    #[test]
    fn exact_linear_ops() {
        let a = Real::sqrt2m1();
        let b = Real::tau();
        let lhs = &(&a + &b) - &b;
        assert_eq!(lhs, a);
        assert_eq!(a.mul_int(3), &(&a + &a) + &a);
    }

    #[test]
    fn floor_and_frac() {
        let x = Real::parse_decimal("-1.25").unwrap();
        assert_eq!(x.floor_int(), BigInt::from(-2));
        assert_eq!(x.frac(), Real::parse_decimal("0.75").unwrap());
        let y = Real::from_int(4);
        assert_eq!(y.floor_int(), BigInt::from(4));
        assert!(y.frac().is_zero());
    }

    #[test]
    fn product_rounding_is_half_even_and_tight() {
        let a = Real::sqrt2m1();
        let prod = a.mul(&a); // (√2−1)^2 = 3 − 2√2
        let expect = &Real::from_int(3) - &Real::sqrt_int(2).mul_int(2);
        // Both sides independently rounded; they may differ by one ulp at most.
        let diff = (&prod - &expect).abs();
        assert!(diff.m <= BigInt::from(2), "{}", diff);
    }

    #[test]
    fn rational_round_trip() {
        let x = Real::parse_decimal("0.124").unwrap();
        let r = x.to_rat();
        assert_eq!(r, Rat::new(BigInt::from(124), BigInt::from(1000)));
        assert_eq!(Real::from_rat(&r), x);
    }
}
