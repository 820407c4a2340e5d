use num_complex::Complex64;

use super::KernelGrid;
use crate::error::{Error, Result};
use crate::flows::{check_cocycle_law, AtomFlow, Cocycle, FlowPoint};
use crate::measure_space::TimeGrid;
use crate::mode::FieldMode;

/// Largest `|t|` in grid steps used when checking the cocycle law before tabulating.
const LAW_STEPS: usize = 6;

/// `f_t(s) = a_t(s) (d(nu o phi_t)/d nu (s))^{1/alpha} f0(phi_t(s))`.
pub fn flow_generated_kernel(
    f0: &[Complex64],
    flow: &dyn AtomFlow,
    cocycle: &dyn Cocycle,
    grid: &TimeGrid,
    mode: FieldMode,
    alpha: f64,
) -> Result<KernelGrid> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let n = flow.atom_count();
    if f0.len() != n {
        return Err(Error::MaskLength { expected: n, got: f0.len() });
    }
    let points: Vec<FlowPoint> = (0..n).map(|s| flow.atom_point(s)).collect();
    let k = LAW_STEPS.min(grid.half_window / 2) as i64;
    let times: Vec<f64> = (-k..=k).map(|j| grid.steps_to_time(j)).collect();
    let report = check_cocycle_law(cocycle, flow, &times, &points);
    if report.errors > 0 {
        return Err(Error::CocycleViolation(f64::INFINITY));
    }
    if !report.passes(1e-12) {
        return Err(Error::CocycleViolation(report.max_discrepancy));
    }
    KernelGrid::from_fn(flow.space(), *grid, mode, |i, s| {
        let t = grid.time(i);
        let landed = flow.apply(points[s], t)?;
        let target = flow.point_atom(landed)?;
        let drift = flow.discrepancy(landed, points[target]);
        if drift > 1e-9 * (1.0 + t.abs()) {
            return Err(Error::Incommensurate { atom: s, shift: t });
        }
        let a = cocycle.at(t, points[s])?;
        if !mode.complex_values() && !a.is_real() {
            return Err(Error::ModeMismatch("real kernel needs a +-1 cocycle".into()));
        }
        let rn = flow.weight_ratio_at(s, t)?;
        Ok(a.to_complex() * rn.powf(1.0 / alpha) * f0[target])
    })
}
