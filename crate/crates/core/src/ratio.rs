//! Exact nonnegative rationals used for every feasibility-gating comparison.
//!
//! Thresholds such as γ arrive as decimal strings ("0.8") or fractions
//! ("2/3") and are kept exact, so `4 edges / 5 cells >= 0.8` never flips on
//! rounding.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<u64>;

/// Parses `"0.75"`, `".5"`, `"1"`, or `"2/3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::arg("empty number"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num
            .trim()
            .parse()
            .map_err(|_| Error::arg(format!("invalid fraction `{s}`")))?;
        let den: u64 = den
            .trim()
            .parse()
            .map_err(|_| Error::arg(format!("invalid fraction `{s}`")))?;
        if den == 0 {
            return Err(Error::arg(format!("zero denominator in `{s}`")));
        }
        return Ok(Ratio::new(num, den));
    }
    if s.starts_with('-') {
        return Err(Error::arg(format!("negative value `{s}`")));
    }
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    let digits_ok = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(Error::arg(format!("invalid decimal `{s}`")));
    }
    if frac_part.len() > 18 {
        return Err(Error::arg(format!("too many decimal places in `{s}`")));
    }
    let den = 10u64.pow(frac_part.len() as u32);
    let int: u64 = if int_part.is_empty() {
        0
    } else {
        int_part
            .parse()
            .map_err(|_| Error::arg(format!("invalid decimal `{s}`")))?
    };
    let frac: u64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().unwrap_or(0)
    };
    let num = int
        .checked_mul(den)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(|| Error::arg(format!("decimal `{s}` out of range")))?;
    Ok(Ratio::new(num, den))
}

/// γ must lie in (0, 1].
pub fn check_gamma(gamma: Rational) -> Result<Rational> {
    if gamma.is_zero() || gamma > Ratio::from_integer(1) {
        return Err(Error::arg(format!("gamma must be in (0, 1], got {gamma}")));
    }
    Ok(gamma)
}

/// θ must lie in [0, 1).
pub fn check_theta(theta: Rational) -> Result<Rational> {
    if theta >= Ratio::from_integer(1) {
        return Err(Error::arg(format!("theta must be in [0, 1), got {theta}")));
    }
    Ok(theta)
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `edges >= ratio * cells`, evaluated without division.
pub(crate) fn meets(edges: u64, ratio: Rational, cells: u64) -> bool {
    (edges as u128) * (*ratio.denom() as u128) >= (*ratio.numer() as u128) * (cells as u128)
}

/// Smallest integer `k` with `k >= ratio * cells`.
pub(crate) fn ceil_mul(ratio: Rational, cells: u64) -> u64 {
    let num = (*ratio.numer() as u128) * (cells as u128);
    let den = *ratio.denom() as u128;
    num.div_ceil(den) as u64
}
