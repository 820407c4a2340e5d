use num_complex::Complex64;

use super::basic::HarmonizableSpec;
use super::KernelGrid;
use crate::error::{Error, Result};
use crate::measure_space::{FiberLayout, TimeGrid, TimeMode, WeightedAtomSpace};
use crate::modular::int_div_mod;
use crate::mode::FieldMode;

const UNIT_TOL: f64 = 1e-12;
const COMMENSURATE_TOL: f64 = 1e-9;

/// `f_t(z, v) = b1(z)^{[v + s(z) t]_{q(z)}} g(z, {v + s(z) t}_{q(z)})` with `g` sampled per fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicKernelSpec {
    pub base: WeightedAtomSpace,
    pub period: Vec<f64>,
    pub b1: Vec<Complex64>,
    pub speed: Vec<f64>,
    /// Samples of `g(z, .)` at the fiber atoms (midpoints, or integers in `Integer` mode).
    pub g: Vec<Vec<Complex64>>,
    pub fiber_mode: TimeMode,
    pub field: FieldMode,
}

impl PeriodicKernelSpec {
    pub fn new(
        base: WeightedAtomSpace,
        period: Vec<f64>,
        b1: Vec<Complex64>,
        speed: Vec<f64>,
        g: Vec<Vec<Complex64>>,
        fiber_mode: TimeMode,
        field: FieldMode,
    ) -> Result<Self> {
        let spec = Self { base, period, b1, speed, g, fiber_mode, field };
        spec.validate()?;
        Ok(spec)
    }

    /// Samples `g(z, u)` at the fiber atoms of `cells[z]` cells.
    #[allow(clippy::too_many_arguments)]
    pub fn sampled(
        base: WeightedAtomSpace,
        period: Vec<f64>,
        b1: Vec<Complex64>,
        speed: Vec<f64>,
        cells: Vec<usize>,
        fiber_mode: TimeMode,
        field: FieldMode,
        g: impl Fn(usize, f64) -> Complex64,
    ) -> Result<Self> {
        let layout = FiberLayout::new(base.clone(), period.clone(), cells, fiber_mode)?;
        let g = (0..base.len())
            .map(|z| (0..layout.cells(z)).map(|j| g(z, layout.position(z, j))).collect())
            .collect();
        Self::new(base, period, b1, speed, g, fiber_mode, field)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.base.len();
        for len in [self.period.len(), self.b1.len(), self.speed.len(), self.g.len()] {
            if len != n {
                return Err(Error::MaskLength { expected: n, got: len });
            }
        }
        self.layout()?;
        for (z, b) in self.b1.iter().enumerate() {
            if (b.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidSpec(format!("b1 at base atom {z} is not unimodular: {b}")));
            }
            if !self.field.complex_values() && b.im != 0.0 {
                return Err(Error::ModeMismatch(format!("b1 at base atom {z} must be +-1 in real mode")));
            }
        }
        if let Some(z) = self.speed.iter().position(|&s| s == 0.0 || !s.is_finite()) {
            return Err(Error::ZeroSpeed(z));
        }
        for (z, gz) in self.g.iter().enumerate() {
            if gz.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if !self.field.complex_values() && gz.iter().any(|v| v.im != 0.0) {
                return Err(Error::ModeMismatch(format!("g at base atom {z} must be real in real mode")));
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> Result<FiberLayout> {
        let cells = self.g.iter().map(Vec::len).collect::<Vec<_>>();
        if self.fiber_mode == TimeMode::Integer {
            for (z, (&q, &c)) in self.period.iter().zip(&cells).enumerate() {
                if q != c as f64 {
                    return Err(Error::InvalidSpec(format!(
                        "integer fiber of base atom {z} has period {q} but {c} samples"
                    )));
                }
            }
        }
        FiberLayout::new(self.base.clone(), self.period.clone(), cells, self.fiber_mode)
    }

    pub fn unit_speed(&self) -> bool {
        self.speed.iter().all(|&s| s == 1.0)
    }
}

/// `b^n` for unimodular `b`, exact for `b = +-1`.
pub fn unit_pow(b: Complex64, n: i64) -> Complex64 {
    if b == Complex64::new(1.0, 0.0) || n == 0 {
        Complex64::new(1.0, 0.0)
    } else if b == Complex64::new(-1.0, 0.0) {
        Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    } else {
        Complex64::from_polar(1.0, b.arg() * n as f64)
    }
}

/// Fiber cells moved per grid step: `s(z) * step / width(z)`, which must be an integer.
fn cell_shift(layout: &FiberLayout, z: usize, speed: f64, grid: &TimeGrid) -> Result<i64> {
    let r = speed * grid.step / layout.width(z);
    let m = r.round();
    if (r - m).abs() > COMMENSURATE_TOL * r.abs().max(1.0) {
        return Err(Error::Incommensurate { atom: z, shift: r });
    }
    Ok(m as i64)
}

pub fn build_periodic_kernel(spec: &PeriodicKernelSpec, grid: &TimeGrid) -> Result<KernelGrid> {
    spec.validate()?;
    if grid.mode != spec.fiber_mode {
        return Err(Error::InvalidSpec("fiber mode must match the time grid mode".into()));
    }
    let layout = spec.layout()?;
    let shifts = (0..layout.base_len())
        .map(|z| cell_shift(&layout, z, spec.speed[z], grid))
        .collect::<Result<Vec<_>>>()?;
    KernelGrid::from_fn(layout.space(), *grid, spec.field, |i, atom| {
        let (z, j) = layout.locate(atom);
        let m = shifts[z] * grid.steps_of_index(i);
        let (n, k) = int_div_mod(j as i64 + m, layout.cells(z) as i64);
        Ok(unit_pow(spec.b1[z], n) * spec.g[z][k as usize])
    })
}

/// Rewrites a speed kernel with unit speed: negative speeds are first turned around with
/// `g^(z, u) = g(z, q(z) - u)`, then `q~ = q / |s|` and `g~(z, u) = |s|^{1/alpha} g^(z, |s| u)`.
///
/// Fiber samples keep their index: cell `j` of the new fiber at `u = (j + 1/2) q~ / cells`
/// reads `g^` at `|s| u`, which is cell `j` of the old one. Turning a fiber around conjugates
/// `b1`, since `[q - x]_q = -[x]_q` off the lattice `qZ`.
pub fn rescale_speed_kernel(spec: &PeriodicKernelSpec, alpha: f64) -> Result<PeriodicKernelSpec> {
    spec.validate()?;
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let mut out = spec.clone();
    for z in 0..spec.base.len() {
        let s = spec.speed[z];
        let q = spec.period[z];
        let cells = spec.g[z].len();
        if spec.fiber_mode == TimeMode::Integer {
            if s.abs() != 1.0 {
                return Err(Error::InvalidSpec(format!(
                    "integer-time speed at base atom {z} must be +-1 to rescale, got {s}"
                )));
            }
            if s < 0.0 {
                // Integer points map by u -> -u mod q; the boundary point 0 picks up a coboundary.
                let conj = spec.b1[z].conj();
                out.g[z] = (0..cells)
                    .map(|u| if u == 0 { spec.g[z][0] } else { conj * spec.g[z][cells - u] })
                    .collect();
                out.b1[z] = conj;
            }
            out.speed[z] = 1.0;
            continue;
        }
        let factor = s.abs().powf(1.0 / alpha);
        let mut g: Vec<Complex64> = spec.g[z].clone();
        if s < 0.0 {
            g.reverse();
            out.b1[z] = spec.b1[z].conj();
        }
        out.g[z] = g.into_iter().map(|v| v * factor).collect();
        out.period[z] = q / s.abs();
        out.speed[z] = 1.0;
    }
    out.validate()?;
    Ok(out)
}

/// Harmonizable spectrum as a cyclic representation: `q = 2`, `b1(z) = e^{2iz}`,
/// `g(z, u) = e^{izu}`, so `f_t(z, v) = e^{iz(v + t)}`.
pub fn harmonizable_as_cyclic(spec: &HarmonizableSpec, fiber_cells: usize, fiber_mode: TimeMode, field: FieldMode) -> Result<PeriodicKernelSpec> {
    if !field.complex_values() {
        return Err(Error::ModeMismatch("harmonizable kernels are complex".into()));
    }
    let base = spec.space()?;
    let n = base.len();
    let cells = match fiber_mode {
        TimeMode::Integer => 2,
        TimeMode::RealGrid => fiber_cells,
    };
    let b1 = spec.frequencies.iter().map(|&x| unit_exp(2.0 * x)).collect();
    PeriodicKernelSpec::sampled(base, vec![2.0; n], b1, vec![1.0; n], vec![cells; n], fiber_mode, field, |z, u| {
        unit_exp(spec.frequencies[z] * u)
    })
}

/// `e^{ix}`, exactly 1 at `x = 0`.
pub(crate) fn unit_exp(x: f64) -> Complex64 {
    if x == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, x)
    }
}
