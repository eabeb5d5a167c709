//! Exact rational scalars: the only numeric type used by the engine.

use alloc::format;
use alloc::string::String;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Arbitrary-precision fraction, always in lowest terms with positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand constructor from machine integers. Panics on zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `true` iff `0 <= r <= 1`.
pub fn in_unit(r: &Rational) -> bool {
    *r >= Rational::zero() && *r <= Rational::one()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NumberError {
    Empty,
    Malformed,
    ZeroDenominator,
}

impl fmt::Display for NumberError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberError::Empty => write!(f, "empty number"),
            NumberError::Malformed => write!(f, "malformed number"),
            NumberError::ZeroDenominator => write!(f, "zero denominator"),
        }
    }
}

impl core::error::Error for NumberError {}

/// Parses `p/q` fractions, plain integers, and finite decimals, all exactly.
pub fn parse_rational(s: &str) -> Result<Rational, NumberError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(NumberError::Empty);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(NumberError::Malformed);
    }
    if let Some((n, d)) = body.split_once('/') {
        let numer = parse_digits(n)?;
        let denom = parse_digits(d)?;
        if denom.is_zero() {
            return Err(NumberError::ZeroDenominator);
        }
        return Ok(Rational::new(numer * BigInt::from(sign), denom));
    }
    if let Some((int_part, frac_part)) = body.split_once('.') {
        if frac_part.is_empty() {
            return Err(NumberError::Malformed);
        }
        let int_digits = if int_part.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int_part)?
        };
        let frac_digits = parse_digits(frac_part)?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let numer = (int_digits * &scale + frac_digits) * BigInt::from(sign);
        return Ok(Rational::new(numer, scale));
    }
    Ok(Rational::from_integer(
        parse_digits(body)? * BigInt::from(sign),
    ))
}

fn parse_digits(s: &str) -> Result<BigInt, NumberError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NumberError::Malformed);
    }
    BigInt::parse_bytes(s.as_bytes(), 10).ok_or(NumberError::Malformed)
}

/// Canonical display form: `p/q`, or just `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
