//! Arbitrary-precision rational scalars and their string form.
//!
//! All exact geometry in this crate is done over `Rat = Ratio<BigInt>`.
//! Machine-readable output always serializes rationals as lowest-terms
//! strings `"a/b"` with `b > 0`, or `"a"` when the denominator is one.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = Ratio<BigInt>;

/// Shorthand for `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// An integer as an exact rational.
pub fn rat_int(n: i64) -> Rat {
    Ratio::from_integer(BigInt::from(n))
}

/// Fractional part in `[0, 1)`, also valid for negative input.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// Floor of a rational as a `BigInt`.
pub fn floor_int(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// Floor as an `i64`; panics when the value does not fit.
pub fn floor_i64(x: &Rat) -> i64 {
    use num::ToPrimitive;
    floor_int(x).to_i64().expect("floor exceeds i64")
}

pub fn is_integer(x: &Rat) -> bool {
    x.denom().is_one()
}

/// Lowest-terms string: `"a"` when the denominator is 1, else `"a/b"`.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Approximate value for display-only output (SVG coordinates, logs).
pub fn rat_to_f64(x: &Rat) -> f64 {
    use num::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of truncated parts for huge terms.
        let n = x.numer().to_f64().unwrap_or(f64::MAX);
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError(pub String);

impl std::fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "malformed rational {:?}", self.0)
    }
}

impl std::error::Error for ParseRatError {}

/// Parse `"a/b"` or `"a"`. Rejects zero denominators; the sign is
/// normalized onto the numerator and the value reduced to lowest terms.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    let bad = || ParseRatError(s.to_string());
    match s.split_once('/') {
        None => {
            let n = BigInt::from_str(s).map_err(|_| bad())?;
            Ok(Ratio::from_integer(n))
        }
        Some((a, b)) => {
            let n = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
    }
}

/// Parse a rational and require it to lie in `[0, 1)`.
pub fn parse_unit_rat(s: &str) -> Result<Rat, ParseRatError> {
    let r = parse_rat(s)?;
    if r.is_negative() || r >= Rat::one() {
        return Err(ParseRatError(format!("{s} not in [0,1)")));
    }
    Ok(r)
}
