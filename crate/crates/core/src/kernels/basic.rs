use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;

use super::periodic::unit_exp;
use super::KernelGrid;
use crate::error::{Error, Result};
use crate::measure_space::{AtomId, TimeGrid, TimeMode, WeightedAtomSpace};
use crate::mode::FieldMode;

/// Point masses `eta` at frequencies `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonizableSpec {
    pub frequencies: Vec<f64>,
    pub masses: Vec<f64>,
}

impl HarmonizableSpec {
    pub fn new(frequencies: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        let spec = Self { frequencies, masses };
        spec.space()?;
        Ok(spec)
    }

    pub fn space(&self) -> Result<WeightedAtomSpace> {
        if self.frequencies.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        WeightedAtomSpace::new(
            self.frequencies.iter().map(|&x| AtomId::Real(x)).collect(),
            self.masses.clone(),
            "spectral atoms",
        )
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }
}

/// `f_t(x) = e^{itx}`.
pub fn build_harmonizable_kernel(spec: &HarmonizableSpec, grid: &TimeGrid, mode: FieldMode) -> Result<KernelGrid> {
    if !mode.complex_values() {
        return Err(Error::ModeMismatch("harmonizable kernels are complex".into()));
    }
    if grid.mode == TimeMode::Integer {
        if let Some(x) = spec.frequencies.iter().find(|x| !(0.0..TAU).contains(*x)) {
            return Err(Error::InvalidSpec(format!("integer-time frequencies lie in [0, 2pi), got {x}")));
        }
    }
    KernelGrid::from_fn(spec.space()?, *grid, mode, |i, s| Ok(unit_exp(grid.time(i) * spec.frequencies[s])))
}

/// Atom 1 carries the constant 1; atom 2 carries `(-1)^t` on integer time and is dropped
/// on real time where it vanishes.
pub fn build_trivial_kernel(grid: &TimeGrid, mass1: f64, mass2: f64) -> Result<KernelGrid> {
    if !(mass2 >= 0.0) {
        return Err(Error::NonPositiveWeight { index: 1, weight: mass2 });
    }
    let alternating = match grid.mode {
        TimeMode::Integer => mass2 > 0.0,
        TimeMode::RealGrid if mass2 > 0.0 => {
            return Err(Error::InvalidSpec("the alternating atom needs integer time".into()));
        }
        TimeMode::RealGrid => false,
    };
    let (atoms, weights) = if alternating {
        (vec![AtomId::Int(1), AtomId::Int(2)], vec![mass1, mass2])
    } else {
        (vec![AtomId::Int(1)], vec![mass1])
    };
    let space = WeightedAtomSpace::new(atoms, weights, "trivial")?;
    KernelGrid::from_fn(space, *grid, FieldMode::Real, |i, s| {
        let sign = if s == 1 && grid.steps_of_index(i).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
        Ok(Complex64::new(sign, 0.0))
    })
}

/// Taps `k(x, u)` for `u = u_min, u_min + 1, ...` in grid steps, one sequence per base atom.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingAverageTaps {
    pub u_min: i64,
    pub taps: Vec<Vec<Complex64>>,
}

impl MovingAverageTaps {
    pub fn real(u_min: i64, taps: Vec<Vec<f64>>) -> Self {
        let taps = taps.into_iter().map(|k| k.into_iter().map(|v| Complex64::new(v, 0.0)).collect()).collect();
        Self { u_min, taps }
    }

    /// `rho^u` for `u = 0..len`.
    pub fn geometric(rho: f64, len: usize) -> Self {
        Self::real(0, vec![(0..len).map(|u| rho.powi(u as i32)).collect()])
    }

    fn tap(&self, x: usize, u: i64) -> Complex64 {
        let k = &self.taps[x];
        let i = u - self.u_min;
        if i < 0 || i as usize >= k.len() {
            Complex64::new(0.0, 0.0)
        } else {
            k[i as usize]
        }
    }
}

/// `f_t(x, u) = k(x, t + u)` on atoms `(x, u)`, `u` ranging over every grid-step offset
/// that meets the taps from some grid time; atoms whose column vanishes are dropped.
/// Each atom carries `weight(x) * step`.
pub fn build_moving_average_kernel(taps: &MovingAverageTaps, base: &WeightedAtomSpace, grid: &TimeGrid, mode: FieldMode) -> Result<KernelGrid> {
    if taps.taps.len() != base.len() {
        return Err(Error::MaskLength { expected: base.len(), got: taps.taps.len() });
    }
    if taps.taps.iter().flatten().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Err(Error::ZeroTaps);
    }
    if !mode.complex_values() && taps.taps.iter().flatten().any(|v| v.im != 0.0) {
        return Err(Error::ModeMismatch("real moving average with complex taps".into()));
    }
    let w = grid.half_window as i64;
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    let mut columns: Vec<Vec<Complex64>> = Vec::new();
    for x in 0..base.len() {
        let len = taps.taps[x].len() as i64;
        for u in (taps.u_min - w)..(taps.u_min + len + w) {
            let col: Vec<Complex64> = (0..grid.len()).map(|i| taps.tap(x, grid.steps_of_index(i) + u)).collect();
            if col.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
                continue;
            }
            atoms.push(AtomId::pair(base.atoms()[x].clone(), AtomId::Int(u)));
            weights.push(base.weight(x) * grid.cell_mass());
            columns.push(col);
        }
    }
    let space = WeightedAtomSpace::new(atoms, weights, format!("{} x lags", base.description))?;
    let values = Array2::from_shape_fn((grid.len(), columns.len()), |(i, s)| columns[s][i]);
    KernelGrid::new(space, *grid, values, mode)
}
