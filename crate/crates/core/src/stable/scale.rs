use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{c0_constant, AlphaSpec};
use crate::error::{Error, Result};
use crate::kernels::KernelGrid;
use crate::measure_space::{Probe, ProbeSet};
use crate::mode::FieldMode;

/// Neumaier-compensated sum, so that splitting the atom set changes the total by at most
/// an ulp or two.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn check_modes(kernel: &KernelGrid, alpha: &AlphaSpec) -> Result<()> {
    if kernel.mode() != alpha.field_mode {
        return Err(Error::ModeMismatch(format!(
            "kernel is {:?} but the alpha spec says {:?}",
            kernel.mode(),
            alpha.field_mode
        )));
    }
    Ok(())
}

/// Probe terms as `(row, coefficient)` in a canonical order, so that any reordering of the
/// probe's pairs gives the same floating-point sum.
fn terms(kernel: &KernelGrid, probe: &Probe) -> Result<Vec<(usize, Complex64)>> {
    probe.validate(kernel.grid(), kernel.mode())?;
    let conjugate = kernel.mode() == FieldMode::Complex;
    let mut terms = probe
        .thetas
        .iter()
        .zip(&probe.times)
        .map(|(&theta, &t)| Ok((kernel.time_index(t)?, if conjugate { theta.conj() } else { theta })))
        .collect::<Result<Vec<_>>>()?;
    terms.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.re.total_cmp(&b.1.re)).then(a.1.im.total_cmp(&b.1.im)));
    Ok(terms)
}

/// The integral `sum_s |sum_k theta_k f_{t_k}(s)|^alpha weight(s)`, times `c0` unless the
/// field is real. Conjugated coefficients in complex mode.
pub fn scale_functional(kernel: &KernelGrid, alpha: &AlphaSpec, probe: &Probe) -> Result<f64> {
    alpha.validate()?;
    check_modes(kernel, alpha)?;
    let terms = terms(kernel, probe)?;
    let a = alpha.alpha;
    let mut total = CompensatedSum::default();
    for (s, &w) in kernel.space().weights().iter().enumerate() {
        let z: Complex64 = terms.iter().map(|&(i, c)| c * kernel.value(i, s)).sum();
        let m = z.norm();
        if m > 0.0 {
            total.add(m.powf(a) * w);
        }
    }
    let factor = match kernel.mode() {
        FieldMode::Real => 1.0,
        FieldMode::Complex | FieldMode::RealPart => c0_constant(a)?,
    };
    Ok(factor * total.value())
}

/// Scale functionals of every probe, in order.
pub fn scale_functionals(kernel: &KernelGrid, alpha: &AlphaSpec, probes: &ProbeSet) -> Result<Vec<f64>> {
    probes.entries.par_iter().map(|p| scale_functional(kernel, alpha, p)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityRow {
    pub probe: usize,
    pub shift: f64,
    pub sigma: f64,
    pub sigma_shifted: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    pub rows: Vec<StationarityRow>,
    pub max_relative_deviation: f64,
}

impl StationarityReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_relative_deviation <= tolerance
    }
}

fn relative(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else if a > 0.0 {
        d / a
    } else {
        f64::INFINITY
    }
}

/// Compares `sigma(theta; t + h)` with `sigma(theta; t)` for every probe and shift.
pub fn check_stationarity(kernel: &KernelGrid, alpha: &AlphaSpec, probes: &ProbeSet, shifts: &[f64]) -> Result<StationarityReport> {
    let base = scale_functionals(kernel, alpha, probes)?;
    let jobs: Vec<(usize, f64)> = (0..probes.len()).flat_map(|p| shifts.iter().map(move |&h| (p, h))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(p, h)| {
            let shifted = scale_functional(kernel, alpha, &probes.entries[p].shifted(h))?;
            Ok(StationarityRow {
                probe: p,
                shift: h,
                sigma: base[p],
                sigma_shifted: shifted,
                relative_deviation: relative(base[p], shifted),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_relative_deviation = rows.iter().map(|r| r.relative_deviation).fold(0.0, f64::max);
    Ok(StationarityReport { rows, max_relative_deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityRow {
    pub probe: usize,
    pub sigma_a: f64,
    /// `scale_b^alpha * sigma_b`.
    pub sigma_b_scaled: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualityReport {
    pub scale_b: f64,
    pub tolerance: f64,
    pub rows: Vec<EqualityRow>,
    /// `max |sigma_a - scale_b^alpha sigma_b| / sigma_a`.
    pub max_relative_deviation: f64,
    /// `max |sigma_a - scale_b^alpha sigma_b| / max(sigma_a, 1)`, the pass criterion.
    pub max_normalized_deviation: f64,
    pub passed: bool,
}

/// Equality in distribution of `a` and `scale_b * b` up to probe coverage. The kernels
/// may differ in field mode as long as both accept the probes.
pub fn check_equal_in_distribution(
    a: &KernelGrid,
    b: &KernelGrid,
    scale_b: f64,
    alpha: f64,
    probes: &ProbeSet,
    tol: f64,
) -> Result<EqualityReport> {
    if !(scale_b > 0.0 && scale_b.is_finite()) {
        return Err(Error::InvalidSpec(format!("scale must be positive, got {scale_b}")));
    }
    let sa = scale_functionals(a, &AlphaSpec::new(alpha, a.mode())?, probes)?;
    let sb = scale_functionals(b, &AlphaSpec::new(alpha, b.mode())?, probes)?;
    let factor = scale_b.powf(alpha);
    let mut rows = Vec::with_capacity(sa.len());
    let mut max_rel = 0.0f64;
    let mut max_norm = 0.0f64;
    for (p, (&x, &y)) in sa.iter().zip(&sb).enumerate() {
        let y = factor * y;
        let d = (x - y).abs();
        max_norm = max_norm.max(d / x.max(1.0));
        let rel = relative(x, y);
        max_rel = max_rel.max(rel);
        rows.push(EqualityRow { probe: p, sigma_a: x, sigma_b_scaled: y, relative_deviation: rel });
    }
    Ok(EqualityReport {
        scale_b,
        tolerance: tol,
        rows,
        max_relative_deviation: max_rel,
        max_normalized_deviation: max_norm,
        passed: max_norm <= tol,
    })
}
