use super::{AtomId, TimeMode, WeightedAtomSpace};
use crate::error::{Error, Result};

/// The space `Z x [0, q(.))` atomized fiber by fiber.
///
/// In `RealGrid` mode fiber `z` holds `cells[z]` midpoints of width `q(z)/cells[z]`;
/// in `Integer` mode it holds the integer points `0..q(z)` with unit mass.
/// Atom `(z, j)` sits at index `offsets[z] + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberLayout {
    base: WeightedAtomSpace,
    period: Vec<f64>,
    cells: Vec<usize>,
    offsets: Vec<usize>,
    mode: TimeMode,
}

impl FiberLayout {
    pub fn new(base: WeightedAtomSpace, period: Vec<f64>, cells: Vec<usize>, mode: TimeMode) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::EmptySpace);
        }
        if period.len() != base.len() {
            return Err(Error::MaskLength { expected: base.len(), got: period.len() });
        }
        let cells = match mode {
            TimeMode::Integer => {
                for &q in &period {
                    if q.fract() != 0.0 || q < 2.0 {
                        return Err(Error::InvalidSpec(format!("integer-time period must be in {{2, 3, ...}}, got {q}")));
                    }
                }
                period.iter().map(|&q| q as usize).collect()
            }
            TimeMode::RealGrid => {
                if cells.len() != base.len() {
                    return Err(Error::MaskLength { expected: base.len(), got: cells.len() });
                }
                if cells.contains(&0) {
                    return Err(Error::NonPositiveCells);
                }
                cells
            }
        };
        if let Some(&q) = period.iter().find(|q| !(**q > 0.0 && q.is_finite())) {
            return Err(Error::InvalidModulus(q));
        }
        let mut offsets = Vec::with_capacity(cells.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &c in &cells {
            acc += c;
            offsets.push(acc);
        }
        Ok(Self { base, period, cells, offsets, mode })
    }

    /// Same number of cells on every fiber.
    pub fn uniform(base: WeightedAtomSpace, period: Vec<f64>, cells: usize, mode: TimeMode) -> Result<Self> {
        let n = base.len();
        Self::new(base, period, vec![cells; n], mode)
    }

    pub fn base(&self) -> &WeightedAtomSpace {
        &self.base
    }

    pub fn mode(&self) -> TimeMode {
        self.mode
    }

    pub fn period(&self, z: usize) -> f64 {
        self.period[z]
    }

    pub fn periods(&self) -> &[f64] {
        &self.period
    }

    pub fn cells(&self, z: usize) -> usize {
        self.cells[z]
    }

    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn width(&self, z: usize) -> f64 {
        match self.mode {
            TimeMode::Integer => 1.0,
            TimeMode::RealGrid => self.period[z] / self.cells[z] as f64,
        }
    }

    pub fn position(&self, z: usize, j: usize) -> f64 {
        match self.mode {
            TimeMode::Integer => j as f64,
            TimeMode::RealGrid => (j as f64 + 0.5) * self.width(z),
        }
    }

    pub fn atom(&self, z: usize, j: usize) -> usize {
        self.offsets[z] + j
    }

    pub fn locate(&self, atom: usize) -> (usize, usize) {
        let z = self.offsets.partition_point(|&o| o <= atom) - 1;
        (z, atom - self.offsets[z])
    }

    /// Cell holding fiber coordinate `v`.
    pub fn cell_of(&self, z: usize, v: f64) -> Result<usize> {
        let q = self.period[z];
        if !(0.0..q).contains(&v) {
            return Err(Error::FiberOutOfRange { v, q });
        }
        let j = match self.mode {
            TimeMode::Integer => {
                if v.fract() != 0.0 {
                    return Err(Error::FiberOutOfRange { v, q });
                }
                v as usize
            }
            TimeMode::RealGrid => ((v / self.width(z)) as usize).min(self.cells[z] - 1),
        };
        Ok(j)
    }

    pub fn space(&self) -> WeightedAtomSpace {
        let mut atoms = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for z in 0..self.base.len() {
            let w = self.base.weight(z) * self.width(z);
            for j in 0..self.cells[z] {
                let v = match self.mode {
                    TimeMode::Integer => AtomId::Int(j as i64),
                    TimeMode::RealGrid => AtomId::Real(self.position(z, j)),
                };
                atoms.push(AtomId::pair(self.base.atoms()[z].clone(), v));
                weights.push(w);
            }
        }
        WeightedAtomSpace::new(atoms, weights, format!("{} x fibers", self.base.description))
            .expect("fiber layout produces distinct positive atoms")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_indexing() {
        let base = WeightedAtomSpace::indexed(vec![1.0, 2.0], "z").unwrap();
        let l = FiberLayout::new(base, vec![1.0, 3.0], vec![4, 2], TimeMode::RealGrid).unwrap();
        assert_eq!(l.len(), 6);
        assert_eq!(l.locate(4), (1, 0));
        assert_eq!(l.atom(1, 1), 5);
        assert_eq!(l.position(1, 1), 2.25);
        assert_eq!(l.cell_of(0, 0.49).unwrap(), 1);
        assert!(l.cell_of(0, 1.0).is_err());
        let s = l.space();
        assert!((s.total_mass() - (1.0 + 6.0)).abs() < 1e-12);
    }

    #[test]
    fn integer_fibers_use_counting_measure() {
        let base = WeightedAtomSpace::indexed(vec![0.5], "z").unwrap();
        let l = FiberLayout::new(base.clone(), vec![3.0], vec![], TimeMode::Integer).unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l.space().weights(), &[0.5, 0.5, 0.5]);
        assert!(FiberLayout::new(base, vec![1.0], vec![], TimeMode::Integer).is_err());
    }
}
