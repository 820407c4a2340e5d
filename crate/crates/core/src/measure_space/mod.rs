//! Finite atomizations of standard Lebesgue spaces, time grids and probe sets.

mod fiber;
mod grid;
mod probe;

pub use fiber::FiberLayout;
pub use grid::{TimeGrid, TimeMode};
pub use probe::{Probe, ProbeSet};

use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque atom label. Real-valued labels carry the cell midpoint they stand for.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum AtomId {
    Label(String),
    Int(i64),
    Real(f64),
    Pair(Box<AtomId>, Box<AtomId>),
}

impl AtomId {
    pub fn pair(a: AtomId, b: AtomId) -> Self {
        AtomId::Pair(Box::new(a), Box::new(b))
    }

    /// Numeric position of the label, when it has one.
    pub fn as_real(&self) -> Option<f64> {
        match self {
            AtomId::Real(x) => Some(*x),
            AtomId::Int(n) => Some(*n as f64),
            _ => None,
        }
    }
}

impl PartialEq for AtomId {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AtomId::Label(a), AtomId::Label(b)) => a == b,
            (AtomId::Int(a), AtomId::Int(b)) => a == b,
            (AtomId::Real(a), AtomId::Real(b)) => a.to_bits() == b.to_bits(),
            (AtomId::Pair(a1, a2), AtomId::Pair(b1, b2)) => a1 == b1 && a2 == b2,
            _ => false,
        }
    }
}

impl Eq for AtomId {}

impl Hash for AtomId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            AtomId::Label(s) => s.hash(state),
            AtomId::Int(n) => n.hash(state),
            AtomId::Real(x) => x.to_bits().hash(state),
            AtomId::Pair(a, b) => {
                a.hash(state);
                b.hash(state);
            }
        }
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomId::Label(s) => write!(f, "{s}"),
            AtomId::Int(n) => write!(f, "{n}"),
            AtomId::Real(x) => write!(f, "{x}"),
            AtomId::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

/// Atoms with positive weights: the ν-mass of the cell each atom represents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedAtomSpace {
    atoms: Vec<AtomId>,
    weights: Vec<f64>,
    pub description: String,
}

impl WeightedAtomSpace {
    pub fn new(atoms: Vec<AtomId>, weights: Vec<f64>, description: impl Into<String>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::MaskLength { expected: atoms.len(), got: weights.len() });
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::NonPositiveWeight { index, weight });
            }
        }
        let mut seen = HashSet::with_capacity(atoms.len());
        for atom in &atoms {
            if !seen.insert(atom) {
                return Err(Error::DuplicateAtom(atom.to_string()));
            }
        }
        Ok(Self { atoms, weights, description: description.into() })
    }

    /// Atoms labelled `0..n` with the given weights.
    pub fn indexed(weights: Vec<f64>, description: impl Into<String>) -> Result<Self> {
        let atoms = (0..weights.len() as i64).map(AtomId::Int).collect();
        Self::new(atoms, weights, description)
    }

    pub fn empty(description: impl Into<String>) -> Self {
        Self { atoms: Vec::new(), weights: Vec::new(), description: description.into() }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[AtomId] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Cartesian product; atom `(i, j)` sits at index `i * b.len() + j`.
    pub fn product(&self, other: &WeightedAtomSpace) -> Result<WeightedAtomSpace> {
        product_space(self, other)
    }

    pub fn restrict(&self, mask: &[bool]) -> Result<WeightedAtomSpace> {
        restrict(self, mask)
    }

    /// Concatenation of spaces whose labels are disjoint after tagging with the block index.
    pub fn concat(blocks: &[&WeightedAtomSpace], description: impl Into<String>) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for (b, space) in blocks.iter().enumerate() {
            for (atom, &w) in space.atoms.iter().zip(&space.weights) {
                atoms.push(AtomId::pair(AtomId::Int(b as i64), atom.clone()));
                weights.push(w);
            }
        }
        Self::new(atoms, weights, description)
    }
}

pub fn product_space(a: &WeightedAtomSpace, b: &WeightedAtomSpace) -> Result<WeightedAtomSpace> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySpace);
    }
    let mut atoms = Vec::with_capacity(a.len() * b.len());
    let mut weights = Vec::with_capacity(a.len() * b.len());
    for (x, wx) in a.atoms.iter().zip(&a.weights) {
        for (y, wy) in b.atoms.iter().zip(&b.weights) {
            atoms.push(AtomId::pair(x.clone(), y.clone()));
            weights.push(wx * wy);
        }
    }
    Ok(WeightedAtomSpace {
        atoms,
        weights,
        description: format!("({}) x ({})", a.description, b.description),
    })
}

/// Keeps the masked atoms. An empty result is a legal, degenerate component.
pub fn restrict(space: &WeightedAtomSpace, mask: &[bool]) -> Result<WeightedAtomSpace> {
    if mask.len() != space.len() {
        return Err(Error::MaskLength { expected: space.len(), got: mask.len() });
    }
    let (atoms, weights) = space
        .atoms
        .iter()
        .zip(&space.weights)
        .zip(mask)
        .filter(|(_, &keep)| keep)
        .map(|((a, &w), _)| (a.clone(), w))
        .unzip();
    Ok(WeightedAtomSpace { atoms, weights, description: space.description.clone() })
}

/// Midpoint atomization of `[lower, upper)` into `cells` equal cells.
pub fn discretize_interval(lower: f64, upper: f64, cells: usize) -> Result<WeightedAtomSpace> {
    if cells == 0 {
        return Err(Error::NonPositiveCells);
    }
    if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
        return Err(Error::DegenerateInterval { lower, upper });
    }
    let width = (upper - lower) / cells as f64;
    let atoms = (0..cells).map(|j| AtomId::Real(lower + (j as f64 + 0.5) * width)).collect();
    WeightedAtomSpace::new(atoms, vec![width; cells], format!("[{lower}, {upper}) in {cells} cells"))
}
