use crate::error::{Error, Result};
use crate::measure_space::{FiberLayout, TimeMode, WeightedAtomSpace};
use crate::modular::frac_mult;

use super::{AtomFlow, Flow, FlowPoint};

/// The canonical cyclic flow `(z, v) -> (z, {v + t}_{q(z)})` on `Z x [0, q(.))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicFlowSpec {
    layout: FiberLayout,
}

impl CyclicFlowSpec {
    pub fn new(base: WeightedAtomSpace, period: Vec<f64>, fiber_cells: Vec<usize>, mode: TimeMode) -> Result<Self> {
        Ok(Self { layout: FiberLayout::new(base, period, fiber_cells, mode)? })
    }

    pub fn from_layout(layout: FiberLayout) -> Self {
        Self { layout }
    }

    pub fn layout(&self) -> &FiberLayout {
        &self.layout
    }

    pub fn period(&self, z: usize) -> f64 {
        self.layout.period(z)
    }
}

fn check_fiber(v: f64, q: f64) -> Result<()> {
    if (0.0..q).contains(&v) {
        Ok(())
    } else {
        Err(Error::FiberOutOfRange { v, q })
    }
}

fn base_index(z: usize, n: usize) -> Result<()> {
    if z < n {
        Ok(())
    } else {
        Err(Error::AtomOutOfRange(z))
    }
}

pub fn cyclic_flow_apply(spec: &CyclicFlowSpec, point: FlowPoint, t: f64) -> Result<FlowPoint> {
    base_index(point.base, spec.layout.base_len())?;
    let q = spec.period(point.base);
    check_fiber(point.offset, q)?;
    Ok(FlowPoint::new(point.base, frac_mult(point.offset + t, q)?))
}

fn circular(a: FlowPoint, b: FlowPoint, q: f64) -> f64 {
    if a.base != b.base {
        return f64::INFINITY;
    }
    let d = (a.offset - b.offset).abs();
    d.min(q - d)
}

impl Flow for CyclicFlowSpec {
    fn name(&self) -> &'static str {
        "cyclic"
    }

    fn apply(&self, point: FlowPoint, t: f64) -> Result<FlowPoint> {
        cyclic_flow_apply(self, point, t)
    }

    fn discrepancy(&self, a: FlowPoint, b: FlowPoint) -> f64 {
        circular(a, b, self.period(a.base))
    }
}

impl AtomFlow for CyclicFlowSpec {
    fn space(&self) -> WeightedAtomSpace {
        self.layout.space()
    }

    fn atom_count(&self) -> usize {
        self.layout.len()
    }

    fn atom_point(&self, atom: usize) -> FlowPoint {
        let (z, j) = self.layout.locate(atom);
        FlowPoint::new(z, self.layout.position(z, j))
    }

    fn point_atom(&self, point: FlowPoint) -> Result<usize> {
        base_index(point.base, self.layout.base_len())?;
        let j = self.layout.cell_of(point.base, point.offset)?;
        Ok(self.layout.atom(point.base, j))
    }
}

/// `(z, v) -> (z, {v + s(z) t}_{q(z)})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedFlowSpec {
    pub base: WeightedAtomSpace,
    pub speed: Vec<f64>,
    pub period: Vec<f64>,
}

impl SpeedFlowSpec {
    pub fn new(base: WeightedAtomSpace, speed: Vec<f64>, period: Vec<f64>) -> Result<Self> {
        if speed.len() != base.len() || period.len() != base.len() {
            return Err(Error::MaskLength { expected: base.len(), got: speed.len().min(period.len()) });
        }
        if let Some(z) = speed.iter().position(|&s| s == 0.0 || !s.is_finite()) {
            return Err(Error::ZeroSpeed(z));
        }
        if let Some(&q) = period.iter().find(|q| !(**q > 0.0 && q.is_finite())) {
            return Err(Error::InvalidModulus(q));
        }
        Ok(Self { base, speed, period })
    }
}

pub fn speed_flow_apply(spec: &SpeedFlowSpec, point: FlowPoint, t: f64) -> Result<FlowPoint> {
    base_index(point.base, spec.base.len())?;
    let z = point.base;
    check_fiber(point.offset, spec.period[z])?;
    Ok(FlowPoint::new(z, frac_mult(point.offset + spec.speed[z] * t, spec.period[z])?))
}

impl Flow for SpeedFlowSpec {
    fn name(&self) -> &'static str {
        "speed"
    }

    fn apply(&self, point: FlowPoint, t: f64) -> Result<FlowPoint> {
        speed_flow_apply(self, point, t)
    }

    fn discrepancy(&self, a: FlowPoint, b: FlowPoint) -> f64 {
        circular(a, b, self.period[a.base])
    }
}
