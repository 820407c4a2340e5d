use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure_space::{FiberLayout, TimeMode, WeightedAtomSpace};
use crate::modular::int_div_mod;

use super::{AtomFlow, CyclicFlowSpec, Flow, FlowPoint};

/// An integer-time flow `phi_n = phi_1^n` given by a bijection of atom indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationFlow {
    space: WeightedAtomSpace,
    map: Vec<usize>,
    /// `d(nu o phi_1)/d nu` per atom.
    weight_ratio: Vec<f64>,
    cycle_of: Vec<usize>,
    position: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

impl PermutationFlow {
    /// Weight ratios default to `weight(phi_1(s)) / weight(s)`.
    pub fn new(space: WeightedAtomSpace, map: Vec<usize>) -> Result<Self> {
        let ratio = map.iter().enumerate().map(|(s, &m)| space.weight(m.min(space.len() - 1)) / space.weight(s)).collect();
        Self::with_weight_ratio(space, map, ratio)
    }

    pub fn with_weight_ratio(space: WeightedAtomSpace, map: Vec<usize>, weight_ratio: Vec<f64>) -> Result<Self> {
        let n = space.len();
        if map.len() != n {
            return Err(Error::MaskLength { expected: n, got: map.len() });
        }
        if weight_ratio.len() != n {
            return Err(Error::MaskLength { expected: n, got: weight_ratio.len() });
        }
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n || seen[m] {
                return Err(Error::NotBijection);
            }
            seen[m] = true;
        }
        if let Some(&w) = weight_ratio.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidSpec(format!("weight ratio must be positive, got {w}")));
        }
        let mut cycle_of = vec![usize::MAX; n];
        let mut position = vec![0; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if cycle_of[start] != usize::MAX {
                continue;
            }
            let id = cycles.len();
            let mut cycle = Vec::new();
            let mut s = start;
            while cycle_of[s] == usize::MAX {
                cycle_of[s] = id;
                position[s] = cycle.len();
                cycle.push(s);
                s = map[s];
            }
            cycles.push(cycle);
        }
        Ok(Self { space, map, weight_ratio, cycle_of, position, cycles })
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn weight_ratio(&self) -> &[f64] {
        &self.weight_ratio
    }

    /// Cycles in order of their minimum atom, each starting at that atom.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// `phi_n(s)` for any integer `n`.
    pub fn power(&self, atom: usize, n: i64) -> usize {
        let cycle = &self.cycles[self.cycle_of[atom]];
        let (_, r) = int_div_mod(self.position[atom] as i64 + n, cycle.len() as i64);
        cycle[r as usize]
    }

    /// `d(nu o phi_n)/d nu` at `atom`, by the chain rule along the orbit.
    pub fn weight_ratio_power(&self, atom: usize, n: i64) -> f64 {
        let mut r = 1.0;
        if n >= 0 {
            let mut s = atom;
            for _ in 0..n {
                r *= self.weight_ratio[s];
                s = self.map[s];
            }
        } else {
            let mut s = atom;
            for _ in 0..(-n) {
                s = self.power(s, -1);
                r /= self.weight_ratio[s];
            }
        }
        r
    }

    fn integer_time(t: f64) -> Result<i64> {
        if t.fract() != 0.0 || !t.is_finite() {
            return Err(Error::OffGrid { time: t });
        }
        Ok(t as i64)
    }
}

impl Flow for PermutationFlow {
    fn name(&self) -> &'static str {
        "permutation"
    }

    fn apply(&self, point: FlowPoint, t: f64) -> Result<FlowPoint> {
        if point.base >= self.space.len() {
            return Err(Error::AtomOutOfRange(point.base));
        }
        Ok(FlowPoint::atom(self.power(point.base, Self::integer_time(t)?)))
    }
}

impl AtomFlow for PermutationFlow {
    fn space(&self) -> WeightedAtomSpace {
        self.space.clone()
    }

    fn atom_count(&self) -> usize {
        self.space.len()
    }

    fn atom_point(&self, atom: usize) -> FlowPoint {
        FlowPoint::atom(atom)
    }

    fn point_atom(&self, point: FlowPoint) -> Result<usize> {
        if point.base < self.space.len() && point.offset == 0.0 {
            Ok(point.base)
        } else {
            Err(Error::AtomOutOfRange(point.base))
        }
    }

    fn weight_ratio_at(&self, atom: usize, t: f64) -> Result<f64> {
        Ok(self.weight_ratio_power(atom, Self::integer_time(t)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointLabel {
    Fixed,
    Cyclic,
    Nonperiodic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointClassification {
    pub labels: Vec<PointLabel>,
    /// Minimal period of each CYCLIC atom.
    pub periods: Vec<Option<u64>>,
}

impl PointClassification {
    pub fn count(&self, label: PointLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Labels each atom by the length of its cycle; cycles longer than `max_order` count
/// as nonperiodic.
pub fn classify_points(flow: &PermutationFlow, max_order: usize) -> PointClassification {
    let n = flow.atom_count();
    let mut labels = Vec::with_capacity(n);
    let mut periods = Vec::with_capacity(n);
    for s in 0..n {
        let len = flow.cycles[flow.cycle_of[s]].len();
        let (label, period) = match len {
            1 => (PointLabel::Fixed, None),
            l if l <= max_order => (PointLabel::Cyclic, Some(l as u64)),
            _ => (PointLabel::Nonperiodic, None),
        };
        labels.push(label);
        periods.push(period);
    }
    PointClassification { labels, periods }
}

/// A permutation flow rewritten as `(z, v) -> (z, {v + t}_{q(z)})` on integer fibers.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCyclicFlow {
    pub spec: CyclicFlowSpec,
    /// Representative (minimum) atom of each base point `z`.
    pub representatives: Vec<usize>,
    /// `Phi(z, v) = phi_v(z)`, indexed `[z][v]`.
    pub phi: Vec<Vec<usize>>,
}

impl CanonicalCyclicFlow {
    pub fn phi(&self, z: usize, v: usize) -> usize {
        self.phi[z][v]
    }

    /// `Phi^{-1}(atom)`.
    pub fn phi_inverse(&self) -> Vec<(usize, usize)> {
        let n: usize = self.phi.iter().map(Vec::len).sum();
        let mut inv = vec![(usize::MAX, usize::MAX); n];
        for (z, fiber) in self.phi.iter().enumerate() {
            for (v, &a) in fiber.iter().enumerate() {
                inv[a] = (z, v);
            }
        }
        inv
    }

    /// Number of `(z, v, t)` with `phi_t(Phi(z, v)) != Phi(z, {v + t}_q)`.
    pub fn conjugation_mismatches(&self, flow: &PermutationFlow, times: &[i64]) -> usize {
        let mut bad = 0;
        for (z, fiber) in self.phi.iter().enumerate() {
            let q = fiber.len() as i64;
            for v in 0..q {
                for &t in times {
                    let lhs = flow.power(self.phi[z][v as usize], t);
                    let (_, w) = int_div_mod(v + t, q);
                    if lhs != self.phi[z][w as usize] {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }
}

pub fn canonicalize_cyclic_flow(flow: &PermutationFlow) -> Result<CanonicalCyclicFlow> {
    let labels = classify_points(flow, flow.atom_count());
    if let Some(s) = labels.labels.iter().position(|&l| l == PointLabel::Fixed) {
        return Err(Error::FixedPointPresent(s));
    }
    if let Some(s) = labels.labels.iter().position(|&l| l == PointLabel::Nonperiodic) {
        return Err(Error::NonperiodicPointPresent(s));
    }
    let representatives: Vec<usize> = flow.cycles.iter().map(|c| c[0]).collect();
    let phi: Vec<Vec<usize>> = flow.cycles.clone();
    let atoms = representatives.iter().map(|&r| flow.space.atoms()[r].clone()).collect();
    let weights = representatives.iter().map(|&r| flow.space.weight(r)).collect();
    let base = WeightedAtomSpace::new(atoms, weights, format!("cycle representatives of {}", flow.space.description))?;
    let periods = phi.iter().map(|c| c.len() as f64).collect();
    let cells = phi.iter().map(Vec::len).collect();
    let layout = FiberLayout::new(base, periods, cells, TimeMode::Integer)?;
    Ok(CanonicalCyclicFlow { spec: CyclicFlowSpec::from_layout(layout), representatives, phi })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(map: Vec<usize>) -> PermutationFlow {
        let space = WeightedAtomSpace::indexed(vec![1.0; map.len()], "s").unwrap();
        PermutationFlow::new(space, map).unwrap()
    }

    #[test]
    fn classification_examples() {
        let c = classify_points(&perm(vec![0, 1, 2]), 3);
        assert_eq!(c.labels, vec![PointLabel::Fixed; 3]);
        let c = classify_points(&perm(vec![1, 2, 3, 4, 0]), 5);
        assert_eq!(c.labels, vec![PointLabel::Cyclic; 5]);
        assert_eq!(c.periods, vec![Some(5); 5]);
        let c = classify_points(&perm(vec![0, 2, 1]), 3);
        assert_eq!(c.labels, vec![PointLabel::Fixed, PointLabel::Cyclic, PointLabel::Cyclic]);
        let c = classify_points(&perm(vec![1, 2, 3, 4, 0]), 4);
        assert_eq!(c.count(PointLabel::Nonperiodic), 5);
    }

    #[test]
    fn canonical_examples() {
        // (0 2)(1 3 4)
        let f = perm(vec![2, 3, 0, 4, 1]);
        let c = canonicalize_cyclic_flow(&f).unwrap();
        assert_eq!(c.representatives, vec![0, 1]);
        assert_eq!(c.spec.layout().periods(), &[2.0, 3.0]);
        assert_eq!(c.conjugation_mismatches(&f, &(-6..=6).collect::<Vec<_>>()), 0);

        let f = perm(vec![1, 2, 3, 4, 5, 6, 0]);
        let c = canonicalize_cyclic_flow(&f).unwrap();
        assert_eq!(c.phi.len(), 1);
        let mut atoms = c.phi[0].clone();
        atoms.sort();
        assert_eq!(atoms, (0..7).collect::<Vec<_>>());

        assert_eq!(canonicalize_cyclic_flow(&perm(vec![0, 1])), Err(Error::FixedPointPresent(0)));
        assert_eq!(perm_err(vec![0, 0]), Error::NotBijection);
    }

    fn perm_err(map: Vec<usize>) -> Error {
        let space = WeightedAtomSpace::indexed(vec![1.0; map.len()], "s").unwrap();
        PermutationFlow::new(space, map).unwrap_err()
    }

    #[test]
    fn speed_two_on_four_points_splits_into_two_cycles() {
        // v -> {v + 2}_4
        let f = perm((0..4).map(|v| (v + 2) % 4).collect());
        let c = canonicalize_cyclic_flow(&f).unwrap();
        assert_eq!(c.phi, vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(c.spec.layout().periods(), &[2.0, 2.0]);
    }

    #[test]
    fn weight_ratio_chain_rule() {
        let space = WeightedAtomSpace::indexed(vec![1.0, 2.0, 4.0], "s").unwrap();
        let f = PermutationFlow::new(space, vec![1, 2, 0]).unwrap();
        assert_eq!(f.weight_ratio(), &[2.0, 2.0, 0.25]);
        assert_eq!(f.weight_ratio_power(0, 2), 4.0);
        assert_eq!(f.weight_ratio_power(0, -1), 4.0);
        assert_eq!(f.weight_ratio_power(0, 3), 1.0);
    }
}
