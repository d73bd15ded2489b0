//! Arbitrary-precision rational scalars and their wire format.
//!
//! Every exact quantity in this crate is a `Rat`. The wire format is the
//! string "p" or "p/q" with decimal integers, q > 0, lowest terms. We parse
//! and print by hand instead of relying on `Display` so the format stays
//! frozen regardless of upstream changes.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

/// Rational from machine integers. Panics on zero denominator (programmer
/// error in literals; parse paths go through `parse_rat`).
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "rat() with zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(BigInt::from(num))
}

/// 2^k for k possibly negative.
pub fn pow2(k: i32) -> Rat {
    let one = BigInt::one();
    if k >= 0 {
        Rat::from_integer(one << (k as usize))
    } else {
        Rat::new(one.clone(), one << ((-k) as usize))
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = |m: &str| Error::Parse(format!("invalid rational {s:?}: {m}"));
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    if num_s.is_empty() {
        return Err(bad("empty numerator"));
    }
    let num = BigInt::from_str(num_s).map_err(|e| bad(&e.to_string()))?;
    let den = match den_s {
        None => BigInt::one(),
        Some(d) if d.is_empty() => return Err(bad("empty denominator")),
        Some(d) => {
            let den = BigInt::from_str(d).map_err(|e| bad(&e.to_string()))?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            den
        }
    };
    Ok(Rat::new(num, den))
}

pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}
