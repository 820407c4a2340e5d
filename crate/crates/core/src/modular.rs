//! The pair `[x]_a = max{n : n a <= x}` and `{x}_a = x - a [x]_a`.
//!
//! Inputs within `SNAP * a` of a lattice point `n a` are snapped onto it before
//! flooring, so that period counts used as cocycle exponents never come out one off.

use crate::error::{Error, Result};

/// Relative distance (in units of `a`) under which `x` is treated as a lattice point.
pub const SNAP: f64 = 1e-12;

fn check_modulus(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModulus(a))
    }
}

/// Floor and remainder together.
pub fn div_mod(x: f64, a: f64) -> Result<(i64, f64)> {
    check_modulus(a)?;
    let mut n = (x / a).floor();
    let mut r = (-a).mul_add(n, x);
    // the quotient can round across an integer for large |x / a|
    if r < 0.0 {
        n -= 1.0;
        r = (-a).mul_add(n, x);
    } else if r >= a {
        n += 1.0;
        r = (-a).mul_add(n, x);
    }
    if r <= SNAP * a {
        return Ok((n as i64, 0.0));
    }
    if a - r <= SNAP * a {
        return Ok((n as i64 + 1, 0.0));
    }
    Ok((n as i64, r))
}

pub fn floor_mult(x: f64, a: f64) -> Result<i64> {
    div_mod(x, a).map(|(n, _)| n)
}

pub fn frac_mult(x: f64, a: f64) -> Result<f64> {
    div_mod(x, a).map(|(_, r)| r)
}

/// Floor division on integers, used for exact fiber index arithmetic.
pub fn int_div_mod(x: i64, a: i64) -> (i64, i64) {
    (x.div_euclid(a), x.rem_euclid(a))
}
