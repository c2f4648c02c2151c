//! Arbitrary-precision real arithmetic context.
//!
//! Thin wrapper around `astro_float` that fixes a working precision up
//! front, owns the shared constants cache, and converts to and from the
//! exact types used elsewhere in the crate. All height computations go
//! through a [`RealCtx`] so precision decisions live in exactly one place.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Bits per decimal digit, rounded up generously.
const LOG2_10: f64 = 3.321928094887362;
/// Guard bits on top of the requested decimal precision.
const GUARD_BITS: usize = 64;

/// A fixed-precision real arithmetic context.
///
/// Not `Sync`: the constants cache needs interior mutability. Parallel
/// callers should clone one context per worker.
pub struct RealCtx {
    digits: u32,
    bits: usize,
    rm: RoundingMode,
    cc: RefCell<Consts>,
}

impl Clone for RealCtx {
    fn clone(&self) -> Self {
        RealCtx::new(self.digits)
    }
}

impl RealCtx {
    /// A context carrying roughly `digits` decimal digits of working
    /// precision (plus guard bits).
    pub fn new(digits: u32) -> Self {
        let bits = (digits as f64 * LOG2_10).ceil() as usize + GUARD_BITS;
        RealCtx {
            digits,
            bits,
            rm: RoundingMode::ToEven,
            cc: RefCell::new(Consts::new().expect("constants cache allocation")),
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_i64(0, self.bits)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_i64(1, self.bits)
    }

    pub fn from_i64(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.bits)
    }

    pub fn from_bigint(&self, v: &BigInt) -> BigFloat {
        self.parse_decimal(&v.to_string())
    }

    pub fn from_ratio(&self, v: &BigRational) -> BigFloat {
        self.div(&self.from_bigint(v.numer()), &self.from_bigint(v.denom()))
    }

    pub fn parse_decimal(&self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.bits, self.rm, &mut self.cc.borrow_mut())
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, self.rm)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, self.rm)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, self.rm)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, self.rm)
    }

    pub fn neg(&self, a: &BigFloat) -> BigFloat {
        self.sub(&self.zero(), a)
    }

    pub fn abs(&self, a: &BigFloat) -> BigFloat {
        a.abs()
    }

    /// Natural logarithm. The argument must be positive.
    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, self.rm, &mut self.cc.borrow_mut())
    }

    /// Square root. The argument must be nonnegative.
    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, self.rm)
    }

    /// Total order. Panics on NaN, which this crate's pipelines never
    /// produce from valid inputs.
    pub fn cmp(&self, a: &BigFloat, b: &BigFloat) -> Ordering {
        match a.cmp(b) {
            Some(s) if s < 0 => Ordering::Less,
            Some(s) if s > 0 => Ordering::Greater,
            Some(_) => Ordering::Equal,
            None => panic!("NaN in real-arithmetic comparison"),
        }
    }

    pub fn is_negative(&self, a: &BigFloat) -> bool {
        a.is_negative() && !a.is_zero()
    }

    /// Best-effort f64 view (for thresholds and diagnostics, not results).
    pub fn to_f64(&self, a: &BigFloat) -> f64 {
        let s = a
            .format(Radix::Dec, self.rm, &mut self.cc.borrow_mut())
            .expect("finite value formats");
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    /// Plain (non-scientific) decimal rendering rounded to `sig` significant
    /// digits, trailing fractional zeros stripped.
    pub fn to_decimal_string(&self, a: &BigFloat, sig: usize) -> String {
        let s = a
            .format(Radix::Dec, self.rm, &mut self.cc.borrow_mut())
            .expect("finite value formats");
        sci_to_plain(&s, sig.max(1))
    }

    /// Convenience: rendering at the context's own digit count.
    pub fn to_default_string(&self, a: &BigFloat) -> String {
        self.to_decimal_string(a, self.digits as usize)
    }
}

/// Convert `astro_float`'s scientific notation (`-D.DDD…e±E`, or `0.0`) to a
/// plain decimal string with `sig` significant digits.
fn sci_to_plain(s: &str, sig: usize) -> String {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (mant, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().expect("exponent is an integer")),
        None => (body, 0),
    };
    let mut digits: Vec<u8> = Vec::new();
    for ch in mant.chars() {
        match ch {
            '0'..='9' => digits.push(ch as u8 - b'0'),
            '.' => {}
            _ => unreachable!("unexpected mantissa character {ch}"),
        }
    }
    if digits.iter().all(|&d| d == 0) {
        return "0".to_string();
    }
    // Normalize: exactly one digit before the implied point, so the value is
    // digits[0].digits[1..] × 10^exp10.
    let first_nonzero = digits.iter().position(|&d| d != 0).unwrap();
    let int_len = mant.find('.').unwrap_or(mant.len());
    let mut exp10 = exp + (int_len as i64 - 1) - first_nonzero as i64;
    digits.drain(..first_nonzero);

    // Round to `sig` significant digits (half away from zero).
    if digits.len() > sig {
        let round_up = digits[sig] >= 5;
        digits.truncate(sig);
        if round_up {
            let mut i = digits.len();
            loop {
                if i == 0 {
                    digits.insert(0, 1);
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
    }
    // Trailing zeros in the significand carry no information here.
    while digits.len() > 1 && *digits.last().unwrap() == 0 {
        digits.pop();
    }

    let ds: String = digits.iter().map(|&d| (b'0' + d) as char).collect();
    let point_pos = exp10 + 1; // digits before the decimal point
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point_pos <= 0 {
        out.push_str("0.");
        for _ in 0..(-point_pos) {
            out.push('0');
        }
        out.push_str(&ds);
    } else if point_pos as usize >= ds.len() {
        out.push_str(&ds);
        for _ in 0..(point_pos as usize - ds.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&ds[..point_pos as usize]);
        out.push('.');
        out.push_str(&ds[point_pos as usize..]);
    }
    out
}
