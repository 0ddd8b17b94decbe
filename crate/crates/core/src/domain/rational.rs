//! Rational scalar helpers.
//!
//! Every scalar in the decision path is a [`Rational`]: an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::DomainError;

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `p/q`, `p`, or a signed variant of either.
pub fn parse_rational(text: &str) -> Result<Rational, DomainError> {
    let bad = || DomainError::MalformedRational(text.to_string());
    let t = text.trim();
    if t.is_empty() {
        return Err(bad());
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = parse_int(num).ok_or_else(bad)?;
    let den: BigInt = parse_int(den).ok_or_else(bad)?;
    if den.is_zero() || den.is_negative() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.trim_start_matches('+').parse().ok()
}

/// `p/q`, or just `p` for integers; the inverse of [`parse_rational`].
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64`, for reporting and Monte-Carlo comparisons only.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let shift = r.numer().bits().max(r.denom().bits()) as i64 - 1000;
        let scale = BigInt::one() << shift.max(0) as usize;
        let n = (r.numer() / &scale).to_f64().unwrap_or(0.0);
        let d = (r.denom() / &scale).to_f64().unwrap_or(1.0);
        n / d
    })
}
