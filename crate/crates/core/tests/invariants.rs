use num_complex::Complex64;
use proptest::prelude::*;

use stableflow::decompose::{decompose_four, ComponentLabel, DetectionConfig};
use stableflow::kernels::{build_harmonizable_kernel, build_periodic_kernel, harmonizable_as_cyclic, HarmonizableSpec, KernelGrid};
use stableflow::measure_space::{Probe, ProbeSet, TimeGrid, TimeMode};
use stableflow::stable::{scale_functional, AlphaSpec};
use stableflow::FieldMode;

fn harmonizable(freqs: &[f64], masses: &[f64], grid: &TimeGrid, mode: FieldMode) -> KernelGrid {
    build_harmonizable_kernel(&HarmonizableSpec::new(freqs.to_vec(), masses.to_vec()).unwrap(), grid, mode).unwrap()
}

fn spectrum() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..5).prop_flat_map(|n| (prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(0.1f64..2.0, n)))
}

fn probe() -> impl Strategy<Value = (Vec<f64>, Vec<i64>)> {
    (1usize..5).prop_flat_map(|n| (prop::collection::vec(-1.0f64..1.0, n), prop::collection::vec(-8i64..=8, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scale_is_homogeneous_and_order_free((f, m) in spectrum(), (th, ts) in probe(), c in 0.1f64..3.0, alpha in 0.2f64..1.95) {
        let grid = TimeGrid::real(0.25, 16).unwrap();
        let k = harmonizable(&f, &m, &grid, FieldMode::RealPart);
        let a = AlphaSpec::new(alpha, FieldMode::RealPart).unwrap();
        let times: Vec<f64> = ts.iter().map(|&s| grid.steps_to_time(s)).collect();
        let p = Probe::real(&th, &times);
        let base = scale_functional(&k, &a, &p).unwrap();
        let scaled = scale_functional(&k, &a, &p.scaled(Complex64::new(c, 0.0))).unwrap();
        prop_assert!((scaled - c.powf(alpha) * base).abs() <= 1e-12 * scaled.max(1.0));
        let rev = Probe::real(&th.iter().rev().copied().collect::<Vec<_>>(), &times.iter().rev().copied().collect::<Vec<_>>());
        prop_assert_eq!(scale_functional(&k, &a, &rev).unwrap(), base);
    }

    #[test]
    fn concat_adds_scale((f, m) in spectrum(), (g, n) in spectrum(), (th, ts) in probe(), alpha in 0.2f64..1.95) {
        let grid = TimeGrid::integer(16).unwrap();
        let f: Vec<f64> = f.iter().map(|x| x.rem_euclid(std::f64::consts::TAU)).collect();
        let g: Vec<f64> = g.iter().map(|x| x.rem_euclid(std::f64::consts::TAU)).collect();
        let a_k = harmonizable(&f, &m, &grid, FieldMode::Complex);
        let b_k = harmonizable(&g, &n, &grid, FieldMode::Complex);
        let Ok(joined) = KernelGrid::concat(&[&a_k, &b_k], "a+b") else { return Ok(()); };
        let a = AlphaSpec::new(alpha, FieldMode::Complex).unwrap();
        let times: Vec<f64> = ts.iter().map(|&s| s as f64).collect();
        let p = Probe::real(&th, &times);
        let sum = scale_functional(&a_k, &a, &p).unwrap() + scale_functional(&b_k, &a, &p).unwrap();
        let whole = scale_functional(&joined, &a, &p).unwrap();
        prop_assert!((whole - sum).abs() <= 1e-13 * whole.max(1e-300));
    }
}

#[test]
fn decomposition_does_not_depend_on_the_construction() {
    // the same harmonizable process written plainly and on [0, 2) fibers
    let grid = TimeGrid::real(1.0 / 32.0, 32).unwrap();
    let spec = HarmonizableSpec::new(vec![0.9, -2.2, 4.1], vec![1.0, 0.3, 0.6]).unwrap();
    let plain = build_harmonizable_kernel(&spec, &grid, FieldMode::Complex).unwrap();
    let cyclic = build_periodic_kernel(&harmonizable_as_cyclic(&spec, 512, TimeMode::RealGrid, FieldMode::Complex).unwrap(), &grid).unwrap();
    let probes = ProbeSet::default_suite(12, &grid, FieldMode::Complex);
    let cfg = DetectionConfig::default();
    for alpha in [0.6, 1.4] {
        let a = AlphaSpec::new(alpha, FieldMode::Complex).unwrap();
        let p = decompose_four(&plain, &a, &probes, &cfg, None).unwrap();
        let c = decompose_four(&cyclic, &a, &probes, &cfg, None).unwrap();
        assert_eq!(c.component(ComponentLabel::FixedHarmonizable).atoms.len(), cyclic.atom_count());
        let factor = 2f64.powf(1.0 / alpha).powf(alpha);
        for label in ComponentLabel::ALL {
            for (x, y) in c.component(label).sigma.iter().zip(&p.component(label).sigma) {
                assert!((x - factor * y).abs() <= 1e-9 * x.max(1.0), "{label} alpha {alpha}: {x} vs {}", factor * y);
            }
        }
    }
}
