//! Exact rationals for constants, bounds and estimates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `3`, `0.25`, `-1.5`, `13/5` or `1e-3` into an exact rational.
pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::InvalidNumber(text.to_string());
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let numer: BigInt = format!("{whole}{frac}0").parse().map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32 - 1;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, scale.unsigned_abs() as usize))
    };
    Ok(if negative { -value } else { value })
}

/// Decimal rendering: exact when the expansion terminates, otherwise rounded
/// to `max_places` places with trailing zeros trimmed.
pub fn to_decimal(value: &Rational, max_places: usize) -> String {
    let negative = value.is_negative();
    let v = value.abs();
    let (whole, rem) = v.numer().div_rem(v.denom());
    let mut digits = String::new();
    let mut r = rem;
    let ten = BigInt::from(10);
    for _ in 0..max_places {
        if r.is_zero() {
            break;
        }
        r *= &ten;
        let (d, next) = r.div_rem(v.denom());
        digits.push(char::from(b'0' + d.to_u8().unwrap_or(0)));
        r = next;
    }
    let mut whole = whole;
    if !r.is_zero() && r.clone() * 2 >= *v.denom() {
        // round half up on the last kept digit
        let mut carry = true;
        let mut bytes: Vec<u8> = digits.into_bytes();
        for b in bytes.iter_mut().rev() {
            if !carry {
                break;
            }
            if *b == b'9' {
                *b = b'0';
            } else {
                *b += 1;
                carry = false;
            }
        }
        if carry {
            whole += 1;
        }
        digits = String::from_utf8(bytes).unwrap_or_default();
    }
    let digits = digits.trim_end_matches('0');
    let sign = if negative && !(whole.is_zero() && digits.is_empty()) { "-" } else { "" };
    if digits.is_empty() {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{digits}")
    }
}
