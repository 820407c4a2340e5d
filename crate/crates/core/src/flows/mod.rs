//! Flows, cocycles and point classification.
//!
//! Every flow implements [`Flow`] on points `(base atom, offset)`; flows acting on a
//! finite set of atoms additionally implement [`AtomFlow`] so kernels can be generated
//! from them.

mod cocycle;
mod cyclic;
mod permutation;
mod special;

pub use cocycle::{
    cyclic_cocycle_eval, Cocycle, CyclicCocycle, Phase, PowerCocycle, StepCocycle, TabulatedCocycle, UnitCocycle,
};
pub use cyclic::{cyclic_flow_apply, speed_flow_apply, CyclicFlowSpec, SpeedFlowSpec};
pub use permutation::{
    canonicalize_cyclic_flow, classify_points, CanonicalCyclicFlow, PermutationFlow, PointClassification,
    PointLabel,
};
pub use special::{special_flow_apply, SpecialFlowSpec};

use serde::Serialize;

use crate::error::Result;
use crate::measure_space::WeightedAtomSpace;

/// A point `(z, v)`: base atom and position in its fiber. Permutation flows use offset 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowPoint {
    pub base: usize,
    pub offset: f64,
}

impl FlowPoint {
    pub fn new(base: usize, offset: f64) -> Self {
        Self { base, offset }
    }

    pub fn atom(atom: usize) -> Self {
        Self { base: atom, offset: 0.0 }
    }
}

pub trait Flow: Send + Sync {
    fn name(&self) -> &'static str;

    /// `phi_t(point)`.
    fn apply(&self, point: FlowPoint, t: f64) -> Result<FlowPoint>;

    /// Distance between two points of the flow's space; infinite across base atoms.
    fn discrepancy(&self, a: FlowPoint, b: FlowPoint) -> f64 {
        if a.base != b.base {
            f64::INFINITY
        } else {
            (a.offset - b.offset).abs()
        }
    }
}

/// A flow realized as a map on the atoms of a finite space.
pub trait AtomFlow: Flow {
    fn space(&self) -> WeightedAtomSpace;
    fn atom_count(&self) -> usize;
    fn atom_point(&self, atom: usize) -> FlowPoint;
    fn point_atom(&self, point: FlowPoint) -> Result<usize>;

    fn map_atom(&self, atom: usize, t: f64) -> Result<usize> {
        self.point_atom(self.apply(self.atom_point(atom), t)?)
    }

    /// `d(nu o phi_t)/d nu` at `atom`; 1 for measure-preserving flows.
    fn weight_ratio_at(&self, _atom: usize, _t: f64) -> Result<f64> {
        Ok(1.0)
    }
}

/// Outcome of an exhaustive law check over sampled `(t1, t2, point)` triples.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LawReport {
    pub checked: usize,
    pub max_discrepancy: f64,
    /// Triples whose discrepancy is nonzero.
    pub violations: usize,
    /// Triples whose evaluation errored.
    pub errors: usize,
}

impl LawReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.errors == 0 && self.max_discrepancy <= tolerance
    }

    fn record(&mut self, discrepancy: Result<f64>) {
        self.checked += 1;
        match discrepancy {
            Ok(d) => {
                if d > 0.0 {
                    self.violations += 1;
                }
                if !(d <= self.max_discrepancy) {
                    self.max_discrepancy = d;
                }
            }
            Err(_) => self.errors += 1,
        }
    }
}

/// Checks `phi_{t1+t2}(s) = phi_{t1}(phi_{t2}(s))` over all sampled pairs and points.
pub fn check_flow_law(flow: &dyn Flow, sample_times: &[f64], sample_points: &[FlowPoint]) -> LawReport {
    let mut report = LawReport::default();
    for &t1 in sample_times {
        for &t2 in sample_times {
            for &p in sample_points {
                report.record((|| {
                    let lhs = flow.apply(p, t1 + t2)?;
                    let rhs = flow.apply(flow.apply(p, t2)?, t1)?;
                    Ok(flow.discrepancy(lhs, rhs))
                })());
            }
        }
    }
    report
}

/// Checks `a_{t1+t2}(s) = a_{t1}(s) a_{t2}(phi_{t1}(s))` over all sampled pairs and points.
pub fn check_cocycle_law(
    cocycle: &dyn Cocycle,
    flow: &dyn Flow,
    sample_times: &[f64],
    sample_points: &[FlowPoint],
) -> LawReport {
    let mut report = LawReport::default();
    for &t1 in sample_times {
        for &t2 in sample_times {
            for &p in sample_points {
                report.record((|| {
                    let lhs = cocycle.at(t1 + t2, p)?;
                    let rhs = cocycle.at(t1, p)? * cocycle.at(t2, flow.apply(p, t1)?)?;
                    Ok(lhs.distance(rhs))
                })());
            }
        }
    }
    report
}
