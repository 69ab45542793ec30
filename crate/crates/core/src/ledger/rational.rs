//! Exact-rational helpers: decimal parsing, floor, and decimal rendering
//! without passing through floating point.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{LabError, Result};

pub type Rational = BigRational;

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio_big(n: BigUint, d: BigUint) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Nearest double, for reporting only.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Parses a decimal literal such as `-21.1139297` into an integer scaled by
/// `10^scale_digits`; more fractional digits than `scale_digits` is an error.
pub fn parse_scaled_decimal(s: &str, scale_digits: u32) -> Result<i64> {
    let s = s.trim();
    let bad = || LabError::Parse(format!("not a decimal with <= {scale_digits} fractional digits: {s:?}"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
        || frac_part.len() > scale_digits as usize
    {
        return Err(bad());
    }
    let mut digits = String::with_capacity(int_part.len() + scale_digits as usize);
    digits.push_str(if int_part.is_empty() { "0" } else { int_part });
    digits.push_str(frac_part);
    for _ in frac_part.len()..scale_digits as usize {
        digits.push('0');
    }
    let v: i64 = digits.parse().map_err(|_| bad())?;
    Ok(if neg { -v } else { v })
}

/// Greatest integer not exceeding `q`.
pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

pub fn floor_i64(q: &Rational) -> Option<i64> {
    floor(q).to_i64()
}

/// Renders `q` in decimal, truncated toward zero after `digits` places.
pub fn to_decimal(q: &Rational, digits: usize) -> String {
    let neg = q.is_negative();
    let a = q.abs();
    let (ip, mut rem) = a.numer().div_rem(a.denom());
    let mut out = String::new();
    if neg && !(ip.is_zero() && rem.is_zero()) {
        out.push('-');
    }
    out.push_str(&ip.to_string());
    if digits > 0 {
        out.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            rem *= &ten;
            let (d, r) = rem.div_rem(a.denom());
            out.push_str(&d.to_string());
            rem = r;
        }
    }
    out
}

/// `numer/denom` form (integers print without a slash).
pub fn to_fraction(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) mod serde_rational {
    use super::{to_fraction, Rational};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_decimal_parsing() {
        assert_eq!(parse_scaled_decimal("21.1139297", 7).unwrap(), 211_139_297);
        assert_eq!(parse_scaled_decimal("28", 7).unwrap(), 280_000_000);
        assert_eq!(parse_scaled_decimal("-0.5", 7).unwrap(), -5_000_000);
        assert_eq!(parse_scaled_decimal(".25", 2).unwrap(), 25);
        assert!(parse_scaled_decimal("1.00000001", 7).is_err());
        assert!(parse_scaled_decimal("1e3", 7).is_err());
        assert!(parse_scaled_decimal("", 7).is_err());
        assert!(parse_scaled_decimal(".", 7).is_err());
    }

    #[test]
    fn floor_of_negative_fraction() {
        assert_eq!(floor(&ratio(-7, 2)), BigInt::from(-4));
        assert_eq!(floor(&ratio(286, 6)), BigInt::from(47));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&ratio(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&ratio(-5, 4), 3), "-1.250");
        assert_eq!(to_fraction(&ratio(6, 4)), "3/2");
        assert_eq!(to_fraction(&int(5)), "5");
    }
}
