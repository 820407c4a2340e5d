use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{AtomFlow, CyclicFlowSpec, FlowPoint, PermutationFlow};
use crate::error::{Error, Result};
use crate::measure_space::TimeGrid;
use crate::modular::div_mod;

/// A point of the unit circle stored as a rational number of turns in `[0, 1)`.
///
/// Group operations are exact, so cocycle identities can be checked with zero
/// discrepancy. `-1` is half a turn.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase(Ratio<i64>);

impl Phase {
    pub const ONE: Phase = Phase(Ratio::new_raw(0, 1));
    pub const MINUS_ONE: Phase = Phase(Ratio::new_raw(1, 2));

    pub fn turns(numer: i64, denom: i64) -> Self {
        Phase(Self::reduce(Ratio::new(numer, denom)))
    }

    pub fn from_sign(negative: bool) -> Self {
        if negative {
            Self::MINUS_ONE
        } else {
            Self::ONE
        }
    }

    fn reduce(r: Ratio<i64>) -> Ratio<i64> {
        let d = *r.denom();
        Ratio::new(r.numer().rem_euclid(d), d)
    }

    pub fn as_turns(&self) -> Ratio<i64> {
        self.0
    }

    pub fn inv(self) -> Self {
        Phase(Self::reduce(-self.0))
    }

    pub fn pow(self, n: i64) -> Self {
        let d = *self.0.denom();
        let k = ((*self.0.numer() as i128 * n as i128).rem_euclid(d as i128)) as i64;
        Phase(Ratio::new(k, d))
    }

    pub fn is_real(&self) -> bool {
        *self == Self::ONE || *self == Self::MINUS_ONE
    }

    pub fn to_complex(self) -> Complex64 {
        if self == Self::ONE {
            return Complex64::new(1.0, 0.0);
        }
        if self == Self::MINUS_ONE {
            return Complex64::new(-1.0, 0.0);
        }
        let x = *self.0.numer() as f64 / *self.0.denom() as f64;
        Complex64::from_polar(1.0, TAU * x)
    }

    /// `|self - other|` on the unit circle; exactly 0 for equal phases.
    pub fn distance(self, other: Phase) -> f64 {
        let d = self * other.inv();
        if d == Phase::ONE {
            0.0
        } else {
            (d.to_complex() - Complex64::new(1.0, 0.0)).norm()
        }
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ONE
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase(Self::reduce(self.0 + rhs.0))
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({}/{})", self.0.numer(), self.0.denom())
    }
}

/// Unimodular multiplier `a_t(s)` attached to a flow.
pub trait Cocycle: Send + Sync {
    fn at(&self, t: f64, point: FlowPoint) -> Result<Phase>;
}

/// `a_t = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitCocycle;

impl Cocycle for UnitCocycle {
    fn at(&self, _t: f64, _point: FlowPoint) -> Result<Phase> {
        Ok(Phase::ONE)
    }
}

/// `a_t(z, v) = b1(z)^{[v + s(z) t]_{q(z)}}`, a cocycle for the speed flow with the
/// same `s` and `q`.
#[derive(Debug, Clone)]
pub struct PowerCocycle {
    pub b1: Vec<Phase>,
    pub period: Vec<f64>,
    pub speed: Vec<f64>,
}

impl PowerCocycle {
    pub fn unit_speed(b1: Vec<Phase>, period: Vec<f64>) -> Self {
        let speed = vec![1.0; b1.len()];
        Self { b1, period, speed }
    }
}

impl Cocycle for PowerCocycle {
    fn at(&self, t: f64, p: FlowPoint) -> Result<Phase> {
        let z = p.base;
        let (n, _) = div_mod(p.offset + self.speed[z] * t, self.period[z])?;
        Ok(self.b1[z].pow(n))
    }
}

/// The cocycle transported to the canonical cyclic flow:
/// `a_t(z, v) = a~(z, v)^{-1} b1(z)^{[v+t]_{q(z)}} a~(z, {v+t}_{q(z)})`.
#[derive(Debug, Clone)]
pub struct CyclicCocycle {
    pub spec: CyclicFlowSpec,
    /// `a~` per fiber cell of each base atom.
    pub a_tilde: Vec<Vec<Phase>>,
    pub a1: Vec<Phase>,
}

impl Cocycle for CyclicCocycle {
    fn at(&self, t: f64, p: FlowPoint) -> Result<Phase> {
        cyclic_cocycle_eval(&self.a_tilde, &self.a1, &self.spec, t, p)
    }
}

pub fn cyclic_cocycle_eval(
    a_tilde: &[Vec<Phase>],
    a1: &[Phase],
    spec: &CyclicFlowSpec,
    t: f64,
    point: FlowPoint,
) -> Result<Phase> {
    let layout = spec.layout();
    let z = point.base;
    let j0 = layout.cell_of(z, point.offset)?;
    let (n, v1) = div_mod(point.offset + t, layout.period(z))?;
    let j1 = layout.cell_of(z, v1)?;
    Ok(a_tilde[z][j0].inv() * a1[z].pow(n) * a_tilde[z][j1])
}

/// Integer-time cocycle generated by a one-step multiplier `c`:
/// `a_n(s) = c(s) c(phi_1 s) ... c(phi_{n-1} s)` and `a_{-n}(s) = (c(phi_{-1} s) ... c(phi_{-n} s))^{-1}`.
#[derive(Debug, Clone)]
pub struct StepCocycle {
    pub flow: PermutationFlow,
    pub step: Vec<Phase>,
}

impl Cocycle for StepCocycle {
    fn at(&self, t: f64, point: FlowPoint) -> Result<Phase> {
        if t.fract() != 0.0 || !t.is_finite() {
            return Err(Error::OffGrid { time: t });
        }
        let n = t as i64;
        let s = self.flow.point_atom(point)?;
        let mut acc = Phase::ONE;
        if n >= 0 {
            for k in 0..n {
                acc = acc * self.step[self.flow.power(s, k)];
            }
        } else {
            for k in 1..=(-n) {
                acc = acc * self.step[self.flow.power(s, -k)].inv();
            }
        }
        Ok(acc)
    }
}

/// Explicit table `(grid time, atom) -> phase` over an atom flow.
#[derive(Clone)]
pub struct TabulatedCocycle {
    flow: Arc<dyn AtomFlow>,
    grid: TimeGrid,
    values: HashMap<(i64, usize), Phase>,
}

impl TabulatedCocycle {
    /// Tabulates `source` at every grid time and atom.
    pub fn tabulate(source: &dyn Cocycle, flow: Arc<dyn AtomFlow>, grid: TimeGrid) -> Result<Self> {
        let mut values = HashMap::new();
        for i in 0..grid.len() {
            let steps = grid.steps_of_index(i);
            for atom in 0..flow.atom_count() {
                values.insert((steps, atom), source.at(grid.time(i), flow.atom_point(atom))?);
            }
        }
        Ok(Self { flow, grid, values })
    }

    pub fn set(&mut self, t: f64, atom: usize, value: Phase) -> Result<()> {
        let steps = self.grid.lattice_steps(t)?;
        self.values.insert((steps, atom), value);
        Ok(())
    }
}

impl Cocycle for TabulatedCocycle {
    fn at(&self, t: f64, point: FlowPoint) -> Result<Phase> {
        let steps = self.grid.lattice_steps(t)?;
        let atom = self.flow.point_atom(point)?;
        self.values.get(&(steps, atom)).copied().ok_or(Error::OffGrid { time: t })
    }
}
