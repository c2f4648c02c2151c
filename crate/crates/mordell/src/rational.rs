//! Small exact-arithmetic helpers on `BigRational` and `BigInt`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Parse a rational from `"p"`, `"p/q"`, or `"-p/q"` (ASCII digits, lowest
/// terms not required). Whitespace around the string is ignored.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let err = || Error::RationalParse { input: s.to_string() };
    if t.is_empty() {
        return Err(err());
    }
    let (num_s, den_s) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num_s.parse().map_err(|_| err())?;
    let den: BigInt = den_s.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

/// Exact integer square root of a nonnegative integer, if it is a perfect
/// square.
pub fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Exact square root of a rational, if it is a square in ℚ. The result is
/// nonnegative.
pub fn exact_sqrt(q: &BigRational) -> Option<BigRational> {
    let num = exact_isqrt(q.numer())?;
    let den = exact_isqrt(q.denom())?;
    Some(BigRational::new(num, den))
}

/// p-adic valuation of a nonzero integer.
pub fn valuation_int(n: &BigInt, p: &BigInt) -> u32 {
    debug_assert!(!n.is_zero());
    let mut v = 0u32;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(p);
        if r.is_zero() {
            v += 1;
            m = q;
        } else {
            return v;
        }
    }
}

/// p-adic valuation of a nonzero rational (negative for denominators).
pub fn valuation(q: &BigRational, p: &BigInt) -> i64 {
    debug_assert!(!q.is_zero());
    valuation_int(q.numer(), p) as i64 - valuation_int(q.denom(), p) as i64
}

/// `q * p^e` for a (possibly negative) integer exponent.
pub fn scale_by_prime_power(q: &BigRational, p: &BigInt, e: i64) -> BigRational {
    if e == 0 {
        return q.clone();
    }
    let pw = p.pow(e.unsigned_abs() as u32);
    if e > 0 {
        q * BigRational::from_integer(pw)
    } else {
        q / BigRational::from_integer(pw)
    }
}

/// Convenience constructor for small rationals.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Convenience constructor for small integers as rationals.
pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// True if the integer is a perfect square (sign-aware).
pub fn is_perfect_square(n: &BigInt) -> bool {
    match n.sign() {
        Sign::Minus => false,
        Sign::NoSign => true,
        Sign::Plus => exact_isqrt(n).is_some(),
    }
}

/// Floor of the real cube root of an integer (handles negatives).
pub fn icbrt_floor(n: &BigInt) -> BigInt {
    if n.is_zero() {
        return BigInt::zero();
    }
    if n.is_negative() {
        // floor(cbrt(-m)) = -ceil(cbrt(m))
        let m = -n;
        let r = m.cbrt();
        let exact = &r * &r * &r == m;
        return if exact { -r } else { -(r + BigInt::one()) };
    }
    n.cbrt()
}
