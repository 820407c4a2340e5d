use crate::error::{Error, Result};
use crate::measure_space::WeightedAtomSpace;

use super::{Flow, FlowPoint};

/// Flow built under the roof `r` over the base bijection `V`: a point `(y, u)` with
/// `0 <= u < r(y)` moves up at unit speed and jumps to `(V y, 0)` on hitting the roof.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialFlowSpec {
    pub base: WeightedAtomSpace,
    pub base_map: Vec<usize>,
    pub roof: Vec<f64>,
    inverse: Vec<usize>,
    /// Maximal number of roof crossings per application.
    pub search_bound: usize,
}

impl SpecialFlowSpec {
    pub fn new(base: WeightedAtomSpace, base_map: Vec<usize>, roof: Vec<f64>) -> Result<Self> {
        let n = base.len();
        if base_map.len() != n || roof.len() != n {
            return Err(Error::MaskLength { expected: n, got: base_map.len().min(roof.len()) });
        }
        let mut inverse = vec![usize::MAX; n];
        for (y, &vy) in base_map.iter().enumerate() {
            if vy >= n || inverse[vy] != usize::MAX {
                return Err(Error::NotBijection);
            }
            inverse[vy] = y;
        }
        if let Some(y) = roof.iter().position(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidSpec(format!("roof at base atom {y} must be positive, got {}", roof[y])));
        }
        Ok(Self { base, base_map, roof, inverse, search_bound: 1 << 20 })
    }

    pub fn with_search_bound(mut self, bound: usize) -> Self {
        self.search_bound = bound;
        self
    }
}

/// Walks the orbit across roofs: forward with `u -= r(y), y = V y`, backward with
/// `y = V^{-1} y, u += r(y)`.
pub fn special_flow_apply(spec: &SpecialFlowSpec, point: FlowPoint, t: f64) -> Result<FlowPoint> {
    let mut y = point.base;
    if y >= spec.base.len() {
        return Err(Error::AtomOutOfRange(y));
    }
    if !(0.0..spec.roof[y]).contains(&point.offset) {
        return Err(Error::FiberOutOfRange { v: point.offset, q: spec.roof[y] });
    }
    let mut u = point.offset + t;
    let mut crossings = 0usize;
    while u >= spec.roof[y] {
        u -= spec.roof[y];
        y = spec.base_map[y];
        crossings += 1;
        if crossings > spec.search_bound {
            return Err(Error::SearchBoundExceeded(spec.search_bound));
        }
    }
    while u < 0.0 {
        y = spec.inverse[y];
        u += spec.roof[y];
        crossings += 1;
        if crossings > spec.search_bound {
            return Err(Error::SearchBoundExceeded(spec.search_bound));
        }
    }
    // Rounding in `u += r` can land exactly on the roof.
    if u >= spec.roof[y] {
        u = 0.0;
        y = spec.base_map[y];
    }
    Ok(FlowPoint::new(y, u))
}

impl Flow for SpecialFlowSpec {
    fn name(&self) -> &'static str {
        "special"
    }

    fn apply(&self, point: FlowPoint, t: f64) -> Result<FlowPoint> {
        special_flow_apply(self, point, t)
    }

    /// Distance along the orbit, so `(y, r(y) - eps)` and `(V y, 0)` are close.
    fn discrepancy(&self, a: FlowPoint, b: FlowPoint) -> f64 {
        if a.base == b.base {
            return (a.offset - b.offset).abs();
        }
        if self.base_map[a.base] == b.base {
            return (self.roof[a.base] - a.offset) + b.offset;
        }
        if self.base_map[b.base] == a.base {
            return (self.roof[b.base] - b.offset) + a.offset;
        }
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::check_flow_law;

    fn spec(map: Vec<usize>, roof: Vec<f64>) -> SpecialFlowSpec {
        let base = WeightedAtomSpace::indexed(vec![1.0; map.len()], "y").unwrap();
        SpecialFlowSpec::new(base, map, roof).unwrap()
    }

    #[test]
    fn examples() {
        let id = spec(vec![0], vec![1.0]);
        assert_eq!(special_flow_apply(&id, FlowPoint::new(0, 0.25), 1.0).unwrap(), FlowPoint::new(0, 0.25));
        let swap = spec(vec![1, 0], vec![1.0, 1.0]);
        assert_eq!(special_flow_apply(&swap, FlowPoint::new(0, 0.0), 1.0).unwrap(), FlowPoint::new(1, 0.0));
        assert_eq!(special_flow_apply(&swap, FlowPoint::new(0, 0.0), -1.0).unwrap(), FlowPoint::new(1, 0.0));
        let p = FlowPoint::new(1, 0.5);
        assert_eq!(special_flow_apply(&swap, p, 0.0).unwrap(), p);
        assert!(matches!(
            special_flow_apply(&swap, FlowPoint::new(0, 1.0), 0.0),
            Err(Error::FiberOutOfRange { .. })
        ));
        let tight = spec(vec![1, 0], vec![1.0, 1.0]).with_search_bound(3);
        assert_eq!(
            special_flow_apply(&tight, FlowPoint::new(0, 0.0), 10.0),
            Err(Error::SearchBoundExceeded(3))
        );
    }

    #[test]
    fn negative_times_use_backward_roof_sums() {
        // Roofs 1, 2, 3 on a 3-cycle: (0, 0.5) at t = -1.75 goes back to V^{-1}0 = 2 with u = 3 - 1.25.
        let s = spec(vec![1, 2, 0], vec![1.0, 2.0, 3.0]);
        let p = special_flow_apply(&s, FlowPoint::new(0, 0.5), -1.75).unwrap();
        assert_eq!(p, FlowPoint::new(2, 1.75));
        let p = special_flow_apply(&s, FlowPoint::new(0, 0.5), -4.0).unwrap();
        assert_eq!(p, FlowPoint::new(1, 1.5));
    }

    #[test]
    fn orbit_walk_matches_unit_step_oracle() {
        // Integer roofs: stepping by 1 from (y, 0) is a permutation of cells.
        let s = spec(vec![2, 0, 1], vec![2.0, 1.0, 3.0]);
        let cells: Vec<FlowPoint> =
            (0..3).flat_map(|y| (0..s.roof[y] as usize).map(move |u| FlowPoint::new(y, u as f64))).collect();
        let step = |p: FlowPoint| {
            if p.offset + 1.0 < s.roof[p.base] {
                FlowPoint::new(p.base, p.offset + 1.0)
            } else {
                FlowPoint::new(s.base_map[p.base], 0.0)
            }
        };
        for &c in &cells {
            let mut q = c;
            for n in 0..20 {
                assert_eq!(special_flow_apply(&s, c, n as f64).unwrap(), q);
                q = step(q);
            }
        }
    }

    #[test]
    fn group_law_with_real_roofs() {
        let s = spec(vec![1, 2, 3, 0], vec![0.7, 1.3, std::f64::consts::E, 0.45]);
        let times: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.37).collect();
        let points = vec![FlowPoint::new(0, 0.1), FlowPoint::new(2, 2.5), FlowPoint::new(3, 0.0)];
        let r = check_flow_law(&s, &times, &points);
        assert_eq!(r.errors, 0);
        assert!(r.max_discrepancy <= 1e-12, "{}", r.max_discrepancy);
        let unit = spec(vec![1, 0], vec![1.0, 1.0]);
        let times: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.25).collect();
        let r = check_flow_law(&unit, &times, &[FlowPoint::new(0, 0.5), FlowPoint::new(1, 0.0)]);
        assert_eq!(r.max_discrepancy, 0.0);
    }
}
