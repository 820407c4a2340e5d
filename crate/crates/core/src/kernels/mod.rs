//! Kernel families `f_t(s)` tabulated on a time grid, and the minimality check.

mod basic;
mod generated;
mod minimality;
mod periodic;

pub use basic::{build_harmonizable_kernel, build_moving_average_kernel, build_trivial_kernel, HarmonizableSpec, MovingAverageTaps};
pub use generated::flow_generated_kernel;
pub use minimality::{check_minimality, Minimality, RATIO_TOL};
pub use periodic::{build_periodic_kernel, harmonizable_as_cyclic, rescale_speed_kernel, unit_pow, PeriodicKernelSpec};

use ndarray::{Array2, ArrayView1, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure_space::{TimeGrid, WeightedAtomSpace};
use crate::mode::FieldMode;

/// `f_t(s)` for every grid time (rows) and atom (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGrid {
    space: WeightedAtomSpace,
    grid: TimeGrid,
    values: Array2<Complex64>,
    mode: FieldMode,
}

impl KernelGrid {
    /// Validates shape, finiteness, realness in real mode, and the support condition.
    pub fn new(space: WeightedAtomSpace, grid: TimeGrid, values: Array2<Complex64>, mode: FieldMode) -> Result<Self> {
        let kernel = Self::unchecked(space, grid, values, mode)?;
        if let Some(atom) = kernel.zero_column() {
            return Err(Error::SupportViolation(atom));
        }
        Ok(kernel)
    }

    /// Like [`KernelGrid::new`] but allows all-zero columns and empty spaces, as produced by
    /// restricting to a component.
    pub fn unchecked(space: WeightedAtomSpace, grid: TimeGrid, values: Array2<Complex64>, mode: FieldMode) -> Result<Self> {
        grid.validate()?;
        let (rows, cols) = values.dim();
        if rows != grid.len() {
            return Err(Error::InvalidGrid(format!("kernel has {rows} rows, grid has {} times", grid.len())));
        }
        if cols != space.len() {
            return Err(Error::MaskLength { expected: space.len(), got: cols });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !mode.complex_values() && values.iter().any(|v| v.im != 0.0) {
            return Err(Error::ModeMismatch("real kernel with nonzero imaginary part".into()));
        }
        Ok(Self { space, grid, values, mode })
    }

    /// Tabulates `f(time index, atom)`.
    pub fn from_fn(
        space: WeightedAtomSpace,
        grid: TimeGrid,
        mode: FieldMode,
        mut f: impl FnMut(usize, usize) -> Result<Complex64>,
    ) -> Result<Self> {
        let mut values = Array2::zeros((grid.len(), space.len()));
        for ((i, s), v) in values.indexed_iter_mut() {
            *v = f(i, s)?;
        }
        Self::new(space, grid, values, mode)
    }

    pub fn space(&self) -> &WeightedAtomSpace {
        &self.space
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn mode(&self) -> FieldMode {
        self.mode
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn atom_count(&self) -> usize {
        self.space.len()
    }

    pub fn value(&self, time_index: usize, atom: usize) -> Complex64 {
        self.values[[time_index, atom]]
    }

    pub fn column(&self, atom: usize) -> ArrayView1<'_, Complex64> {
        self.values.column(atom)
    }

    pub fn row(&self, time_index: usize) -> ArrayView1<'_, Complex64> {
        self.values.row(time_index)
    }

    pub fn time_index(&self, t: f64) -> Result<usize> {
        self.grid.index_of(t)
    }

    /// First atom whose column vanishes identically.
    pub fn zero_column(&self) -> Option<usize> {
        (0..self.atom_count()).find(|&s| self.column(s).iter().all(|v| *v == Complex64::new(0.0, 0.0)))
    }

    /// Sub-kernel on the atoms with `mask[s]`, keeping their order.
    pub fn restrict(&self, mask: &[bool]) -> Result<KernelGrid> {
        let space = self.space.restrict(mask)?;
        let keep: Vec<usize> = (0..mask.len()).filter(|&s| mask[s]).collect();
        let values = self.values.select(Axis(1), &keep);
        Self::unchecked(space, self.grid, values, self.mode)
    }

    /// Sub-kernel on the given atoms, in the given order.
    pub fn select(&self, atoms: &[usize]) -> Result<KernelGrid> {
        if let Some(&a) = atoms.iter().find(|&&a| a >= self.atom_count()) {
            return Err(Error::AtomOutOfRange(a));
        }
        let space = WeightedAtomSpace::new(
            atoms.iter().map(|&a| self.space.atoms()[a].clone()).collect(),
            atoms.iter().map(|&a| self.space.weight(a)).collect(),
            self.space.description.clone(),
        )?;
        Self::unchecked(space, self.grid, self.values.select(Axis(1), atoms), self.mode)
    }

    /// Multiplies column `atom` by `c`.
    pub fn scale_column(&self, atom: usize, c: Complex64) -> Result<KernelGrid> {
        let mut values = self.values.clone();
        values.column_mut(atom).mapv_inplace(|v| v * c);
        Self::unchecked(self.space.clone(), self.grid, values, self.mode)
    }

    /// Side-by-side concatenation over disjoint atom sets; grids and modes must agree.
    pub fn concat(blocks: &[&KernelGrid], description: impl Into<String>) -> Result<KernelGrid> {
        let first = blocks.first().ok_or(Error::EmptySpace)?;
        for b in blocks {
            if b.grid != first.grid {
                return Err(Error::InvalidGrid("concatenated kernels must share the time grid".into()));
            }
            if b.mode != first.mode {
                return Err(Error::ModeMismatch("concatenated kernels must share the field mode".into()));
            }
        }
        let spaces: Vec<&WeightedAtomSpace> = blocks.iter().map(|b| &b.space).collect();
        let space = WeightedAtomSpace::concat(&spaces, description)?;
        let views: Vec<_> = blocks.iter().map(|b| b.values.view()).collect();
        let values = ndarray::concatenate(Axis(1), &views).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Self::new(space, first.grid, values, first.mode)
    }
}
