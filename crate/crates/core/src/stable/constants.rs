use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};

use crate::error::{Error, Result};

const JACOBI_NODES: usize = 48;
const LEGENDRE_NODES: usize = 32;
/// Half-periods of `sin` summed before extrapolation.
const HALF_PERIODS: usize = 40;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

fn jacobi(beta: f64) -> GaussJacobi {
    let zero = FiniteAboveNegOneF64::new(0.0).expect("0 > -1");
    let beta = FiniteAboveNegOneF64::new(beta).expect("exponent above -1");
    GaussJacobi::new(NonZeroUsize::new(JACOBI_NODES).expect("nonzero"), zero, beta)
}

/// `c0 = (2 pi)^{-1} int_0^{2 pi} |cos phi|^alpha d phi = (2 / pi) int_0^{pi/2} sin^alpha`.
///
/// Gauss-Jacobi with weight `(1 + y)^alpha` absorbs the endpoint behaviour `psi^alpha`.
pub fn c0_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let integral = FRAC_PI_4
        * jacobi(alpha).integrate(-1.0, 1.0, |y| {
            let psi = FRAC_PI_4 * (1.0 + y);
            (psi.sin() / (1.0 + y)).powf(alpha)
        });
    Ok(integral / FRAC_PI_2)
}

/// The same constant by the tanh-sinh rule (trapezoid rule after a double-exponential
/// change of variables), as an independent cross-check.
pub fn c0_constant_tanh_sinh(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let h = 1.0 / 64.0;
    let n = (4.5 / h) as i64;
    let mut sum = 0.0;
    for k in -n..=n {
        let tau = k as f64 * h;
        let u = FRAC_PI_2 * tau.sinh();
        // psi = (pi/4)(1 + tanh u), written to keep precision as psi -> 0.
        let psi = FRAC_PI_2 / (1.0 + (-2.0 * u).exp());
        let weight = FRAC_PI_4 * FRAC_PI_2 * tau.cosh() / u.cosh().powi(2);
        if weight == 0.0 || !weight.is_finite() {
            continue;
        }
        sum += psi.sin().powf(alpha) * weight;
    }
    Ok(h * sum / FRAC_PI_2)
}

/// `C_alpha = (int_0^inf x^{-alpha} sin x dx)^{-1}`, the LePage series constant.
///
/// The integral is summed over half-periods of `sin` and the alternating partial sums are
/// extrapolated with Wynn's epsilon algorithm.
pub fn series_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    // [0, pi]: x^{-alpha} sin x = x^{1-alpha} (sin x / x), x = (pi/2)(1 + y).
    let first = FRAC_PI_2.powf(2.0 - alpha)
        * jacobi(1.0 - alpha).integrate(-1.0, 1.0, |y| {
            let x = FRAC_PI_2 * (1.0 + y);
            x.sin() / x
        });
    let legendre = GaussLegendre::new(NonZeroUsize::new(LEGENDRE_NODES).expect("nonzero"));
    let mut partial = Vec::with_capacity(HALF_PERIODS);
    let mut acc = first;
    partial.push(acc);
    for k in 1..HALF_PERIODS {
        let a = k as f64 * PI;
        acc += legendre.integrate(a, a + PI, |x| x.powf(-alpha) * x.sin());
        partial.push(acc);
    }
    Ok(1.0 / wynn_epsilon(&partial))
}

/// Limit estimate of a sequence by Wynn's epsilon algorithm (last even column).
pub(crate) fn wynn_epsilon(s: &[f64]) -> f64 {
    let mut prev = vec![0.0; s.len() + 1];
    let mut cur = s.to_vec();
    let mut best = *s.last().expect("nonempty sequence");
    let mut column = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            if d == 0.0 {
                return if column % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / d);
        }
        column += 1;
        prev = cur;
        cur = next;
        if column % 2 == 0 {
            let estimate = *cur.last().expect("nonempty column");
            if !estimate.is_finite() {
                break;
            }
            best = estimate;
        }
    }
    best
}
