//! Acceptance criteria, one test each. Every test prints a single `criterion N ... PASS|FAIL` line.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use stableflow::decompose::{check_inclusions, classify_atoms, decompose_four, flow_point_agreement, DetectionConfig};
use stableflow::families::FamilyRegistry;
use stableflow::flows::{
    canonicalize_cyclic_flow, check_cocycle_law, AtomFlow, CyclicCocycle, CyclicFlowSpec, FlowPoint, PermutationFlow, Phase, StepCocycle,
};
use stableflow::kernels::{
    build_harmonizable_kernel, build_periodic_kernel, check_minimality, flow_generated_kernel, harmonizable_as_cyclic, rescale_speed_kernel,
    HarmonizableSpec, KernelGrid, Minimality, PeriodicKernelSpec,
};
use stableflow::measure_space::{Probe, ProbeSet, TimeGrid, TimeMode, WeightedAtomSpace};
use stableflow::modular::{div_mod, floor_mult, frac_mult};
use stableflow::stable::{
    c0_constant, c0_constant_tanh_sinh, check_equal_in_distribution, check_stationarity, lepage_simulate, lepage_simulate_at, period_difference,
    scale_functional, scale_functionals, AlphaSpec, SimulationConfig,
};
use stableflow::FieldMode;

fn verdict(n: u32, name: &str, ok: bool, detail: String, elapsed: Duration, limit_s: f64) -> bool {
    let in_time = elapsed.as_secs_f64() < limit_s;
    let pass = ok && in_time;
    println!(
        "criterion {n:>2} {name}: {} ({detail}; {:.3}s of {limit_s}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..TAU))
}

fn random_value(rng: &mut ChaCha8Rng, complex: bool) -> Complex64 {
    let r = rng.random_range(0.5..1.5);
    if complex {
        Complex64::from_polar(r, rng.random_range(0.0..TAU))
    } else {
        Complex64::new(if rng.random::<bool>() { r } else { -r }, 0.0)
    }
}

fn shifts(grid: &TimeGrid) -> Vec<f64> {
    [1, -1, 2, -2, 3, -3, 5, -7].into_iter().map(|k| grid.steps_to_time(k)).collect()
}

#[test]
fn criterion_01_modular_algebra() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_ulps = 0.0f64;
    let mut range_ok = true;
    for _ in 0..100_000 {
        let x: f64 = rng.random_range(-1e6..1e6);
        let a: f64 = 10f64.powf(rng.random_range(-3.0..3.0));
        let (n, r) = div_mod(x, a).unwrap();
        range_ok &= (0.0..a).contains(&r);
        let recon = a.mul_add(n as f64, r);
        // one ulp of the larger of the two summands being recombined
        let ulp = x.abs().max((a * n as f64).abs()).max(r) * f64::EPSILON;
        worst_ulps = worst_ulps.max((recon - x).abs() / ulp);
    }
    // flow composition [v + s(t1 + t2)]_q = [v + s t1]_q + [{v + s t1}_q + s t2]_q on dyadic
    // inputs, where every sum is exact
    let mut composition_failures = 0;
    for _ in 0..10_000 {
        let d = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| rng.random_range(lo..hi) as f64 / 1024.0;
        let q = d(&mut rng, 1, 8192);
        let s = d(&mut rng, -4096, 4096);
        let v = d(&mut rng, 0, 8192) % q;
        let (t1, t2) = (d(&mut rng, -65536, 65536), d(&mut rng, -65536, 65536));
        let lhs = floor_mult(v + s * (t1 + t2), q).unwrap();
        let rhs = floor_mult(v + s * t1, q).unwrap() + floor_mult(frac_mult(v + s * t1, q).unwrap() + s * t2, q).unwrap();
        if lhs != rhs {
            composition_failures += 1;
        }
    }
    let ok = range_ok && worst_ulps <= 1.0 && composition_failures == 0;
    let detail = format!("worst reconstruction {worst_ulps:.3} ulp, range ok {range_ok}, composition failures {composition_failures}/10000");
    assert!(verdict(1, "modular algebra", ok, detail, start.elapsed(), 1.0));
}

#[test]
fn criterion_02_cyclic_cocycle_formula() {
    let start = Instant::now();
    let base = WeightedAtomSpace::indexed(vec![1.0, 0.5, 2.0], "z").unwrap();
    let spec = CyclicFlowSpec::new(base, vec![2.0, 3.0, 4.0], vec![2, 3, 4], TimeMode::Integer).unwrap();
    let times: Vec<f64> = (-8..=8).map(f64::from).collect();
    let points: Vec<FlowPoint> = (0..spec.atom_count()).map(|a| spec.atom_point(a)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..20 {
        let mut phase = || Phase::turns(rng.random_range(0..12), 12);
        let a_tilde = [2, 3, 4].iter().map(|&q| (0..q).map(|_| phase()).collect()).collect();
        let a1 = (0..3).map(|_| phase()).collect();
        let c = CyclicCocycle { spec: spec.clone(), a_tilde, a1 };
        let r = check_cocycle_law(&c, &spec, &times, &points);
        checked += r.checked;
        worst = worst.max(r.max_discrepancy);
        bad += r.violations + r.errors;
    }
    let ok = bad == 0 && worst == 0.0 && checked == 20 * 17 * 17 * 9;
    assert!(verdict(2, "cyclic cocycle formula", ok, format!("{checked} checks, max discrepancy {worst}"), start.elapsed(), 1.0));
}

#[test]
fn criterion_03_canonicalization() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    let mut mass_ok = true;
    let mut checks = 0usize;
    for _ in 0..100 {
        let n = rng.random_range(2..=64);
        // random permutation, then break up fixed points by swapping them into neighbours
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            map.swap(i, j);
        }
        let fixed: Vec<usize> = (0..n).filter(|&i| map[i] == i).collect();
        for &i in &fixed {
            if map[i] == i {
                let j = (i + 1) % n;
                map.swap(i, j);
            }
        }
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let flow = PermutationFlow::new(WeightedAtomSpace::indexed(weights, "s").unwrap(), map).unwrap();
        let canon = canonicalize_cyclic_flow(&flow).unwrap();
        let max_q = canon.phi.iter().map(Vec::len).max().unwrap() as i64;
        let times: Vec<i64> = (-2 * max_q..=2 * max_q).collect();
        mismatches += canon.conjugation_mismatches(&flow, &times);
        checks += n * times.len();
        mass_ok &= canon.phi.iter().map(Vec::len).sum::<usize>() == n;
    }
    let ok = mismatches == 0 && mass_ok;
    assert!(verdict(3, "discrete canonicalization", ok, format!("{checks} (z, v, t) checks, {mismatches} mismatches"), start.elapsed(), 5.0));
}

#[test]
fn criterion_04_stationarity_of_builtin_families() {
    let start = Instant::now();
    let registry = FamilyRegistry::with_builtins();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let real = TimeGrid::real(0.125, 24).unwrap();
    let integer = TimeGrid::integer(24).unwrap();
    let freqs: Vec<f64> = (0..6).map(|_| rng.random_range(-4.0..4.0)).collect();
    let masses: Vec<f64> = (0..6).map(|_| rng.random_range(0.1..2.0)).collect();
    // periodic: q = 512 * step / m keeps every fiber commensurate with the grid
    let m: Vec<u32> = (0..3).map(|_| rng.random_range(1..=8)).collect();
    let period: Vec<f64> = m.iter().map(|&m| 512.0 * 0.125 / m as f64).collect();
    let b1: Vec<[f64; 2]> = (0..3).map(|_| unit(&mut rng)).map(|b| [b.re, b.im]).collect();
    let g: Vec<Vec<[f64; 2]>> = (0..3).map(|_| (0..512).map(|_| random_value(&mut rng, true)).map(|v| [v.re, v.im]).collect()).collect();
    let taps: Vec<Vec<f64>> = (0..2).map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let cases = [
        ("harmonizable", json!({"frequencies": freqs, "masses": masses}), real, FieldMode::Complex, 1e-9),
        ("trivial", json!({"mass1": 1.0, "mass2": 0.7}), integer, FieldMode::Real, 1e-9),
        ("periodic", json!({"weights": [1.0, 0.3, 2.0], "period": period, "b1": b1, "cells": 512, "g": g}), real, FieldMode::Complex, 1e-6),
        ("moving_average", json!({"weights": [1.0, 0.5], "u_min": -2, "taps": taps}), integer, FieldMode::Real, 1e-9),
        ("cos_harmonizable", json!({"masses": [1.0, 0.5, 2.0], "shifts": [1, -3, 8], "cells": 512}), real, FieldMode::Real, 1e-6),
        ("sawtooth", json!({"cells": 512}), real, FieldMode::Real, 1e-6),
        ("ergodic_random", json!({"atoms": 64, "seed": 9}), integer, FieldMode::Real, 1e-9),
        ("flow_generated", json!({"map": [1, 2, 0, 3, 5, 4], "f0": [1.0, 2.0, 3.0, 0.5, 1.5, 2.5], "step": [1, -1, [1, 3], [1, 4], 1, -1]}), integer, FieldMode::Complex, 1e-9),
    ];
    let mut all = true;
    let mut details = Vec::new();
    for (name, params, grid, mode, tol) in cases {
        let alpha = AlphaSpec::new(1.3, mode).unwrap();
        let built = registry.build(name, &params, grid, mode, alpha.alpha, ".").unwrap();
        let probes = ProbeSet::default_suite(40, &grid, mode);
        let r = check_stationarity(&built.kernel, &alpha, &probes, &shifts(&grid)).unwrap();
        assert_eq!(r.rows.len(), 32 * 8);
        all &= r.passes(tol);
        details.push(format!("{name} {:.1e}", r.max_relative_deviation));
    }
    assert!(verdict(4, "stationarity", all, details.join(", "), start.elapsed(), 30.0));
}

#[test]
fn criterion_05_harmonizable_as_cyclic() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = TimeGrid::real(1.0 / 32.0, 32).unwrap();
    let spec = HarmonizableSpec::new((0..6).map(|_| rng.random_range(-6.0..6.0)).collect(), (0..6).map(|_| rng.random_range(0.1..2.0)).collect()).unwrap();
    let plain = build_harmonizable_kernel(&spec, &grid, FieldMode::Complex).unwrap();
    let cyclic = build_periodic_kernel(&harmonizable_as_cyclic(&spec, 512, TimeMode::RealGrid, FieldMode::Complex).unwrap(), &grid).unwrap();
    let probes = ProbeSet::default_suite(50, &grid, FieldMode::Complex);
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 1.5] {
        let r = check_equal_in_distribution(&cyclic, &plain, 2f64.powf(1.0 / alpha), alpha, &probes, 1e-6).unwrap();
        worst = worst.max(r.max_relative_deviation);
    }
    let ok = worst <= 1e-6;
    assert!(verdict(5, "harmonizable as cyclic, scale 2^(1/alpha)", ok, format!("max relative deviation {worst:.2e}"), start.elapsed(), 10.0));
}

#[test]
fn criterion_06_cos_kernel_is_real_part_harmonizable() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let step = 1.0 / 16.0;
    let grid = TimeGrid::real(step, 16).unwrap();
    let cells = 2048;
    // z = 2 pi m / (cells * step) moves m fiber cells per grid step
    let m: Vec<i64> = (0..8).map(|_| rng.random_range(1..=96) * if rng.random::<bool>() { 1 } else { -1 }).collect();
    let z: Vec<f64> = m.iter().map(|&m| TAU * m as f64 / (cells as f64 * step)).collect();
    let masses: Vec<f64> = (0..8).map(|_| rng.random_range(0.1..2.0)).collect();
    let base = WeightedAtomSpace::indexed(masses.clone(), "z").unwrap();
    let one = Complex64::new(1.0, 0.0);
    let cos_spec = PeriodicKernelSpec::sampled(base, vec![TAU; 8], vec![one; 8], z.clone(), vec![cells; 8], TimeMode::RealGrid, FieldMode::Real, |_, u| {
        Complex64::new(u.cos(), 0.0)
    })
    .unwrap();
    let cos = build_periodic_kernel(&cos_spec, &grid).unwrap();
    let harm = build_harmonizable_kernel(&HarmonizableSpec::new(z, masses).unwrap(), &grid, FieldMode::RealPart).unwrap();
    let probes = ProbeSet::default_suite(60, &grid, FieldMode::Real);
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 1.5] {
        let r = check_equal_in_distribution(&cos, &harm, TAU.powf(1.0 / alpha), alpha, &probes, 1e-5).unwrap();
        worst = worst.max(r.max_relative_deviation);
        details.push(format!("alpha {alpha}: {:.2e}", r.max_relative_deviation));
    }
    let ok = worst <= 1e-5;
    assert!(verdict(6, "cos kernel vs real-part harmonizable, scale (2 pi)^(1/alpha)", ok, details.join(", "), start.elapsed(), 30.0));
}

/// Smooth `q`-periodic test function with a few random Fourier modes.
struct Fourier {
    q: f64,
    coef: Vec<(i32, Complex64)>,
}

impl Fourier {
    fn random(rng: &mut ChaCha8Rng, q: f64) -> Self {
        let coef = (-2..=2).map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect();
        Self { q, coef }
    }

    fn at(&self, u: f64) -> Complex64 {
        self.coef.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, TAU * k as f64 * u / self.q)).sum::<Complex64>() + Complex64::new(3.0, 0.0)
    }
}

#[test]
fn criterion_07_speed_rescaling_invariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cells = 1024;
    let step = 1.0 / 8.0;
    let grid = TimeGrid::real(step, 16).unwrap();
    let probes = ProbeSet::default_suite(70, &grid, FieldMode::Complex);
    let mut worst = 0.0f64;
    let mut worst_printed = f64::INFINITY;
    let mut negatives = 0;
    for _ in 0..50 {
        let alpha = rng.random_range(0.3..1.9);
        let n = rng.random_range(1..=3);
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
        let period: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..4.0)).collect();
        let m: Vec<i64> = (0..n).map(|_| rng.random_range(1..=6) * if rng.random::<bool>() { 1 } else { -1 }).collect();
        negatives += m.iter().filter(|&&m| m < 0).count();
        // s = m q / (cells step): one grid step moves m fiber cells
        let speed: Vec<f64> = m.iter().zip(&period).map(|(&m, &q)| m as f64 * q / (cells as f64 * step)).collect();
        let b1: Vec<Complex64> = (0..n).map(|_| unit(&mut rng)).collect();
        let g: Vec<Fourier> = period.iter().map(|&q| Fourier::random(&mut rng, q)).collect();
        let base = WeightedAtomSpace::indexed(weights, "z").unwrap();
        let spec = PeriodicKernelSpec::sampled(
            base.clone(),
            period.clone(),
            b1.clone(),
            speed.clone(),
            vec![cells; n],
            TimeMode::RealGrid,
            FieldMode::Complex,
            |z, u| g[z].at(u),
        )
        .unwrap();
        let a = AlphaSpec::new(alpha, FieldMode::Complex).unwrap();
        let original = scale_functionals(&build_periodic_kernel(&spec, &grid).unwrap(), &a, &probes).unwrap();
        let rescaled_spec = rescale_speed_kernel(&spec, alpha).unwrap();
        let rescaled = scale_functionals(&build_periodic_kernel(&rescaled_spec, &grid).unwrap(), &a, &probes).unwrap();
        for (x, y) in original.iter().zip(&rescaled) {
            worst = worst.max((x - y).abs() / x);
        }
        // the variant g~(z, u) = |s|^{1/alpha} g(z, u / |s|) on the same rescaled fibers
        if m.iter().all(|&m| m > 0) && speed.iter().any(|&s| (s - 1.0).abs() > 0.1) {
            let printed = PeriodicKernelSpec::sampled(
                base,
                rescaled_spec.period.clone(),
                b1,
                vec![1.0; n],
                vec![cells; n],
                TimeMode::RealGrid,
                FieldMode::Complex,
                |z, u| g[z].at(u / speed[z]) * speed[z].powf(1.0 / alpha),
            )
            .unwrap();
            let other = scale_functionals(&build_periodic_kernel(&printed, &grid).unwrap(), &a, &probes).unwrap();
            let dev = original.iter().zip(&other).map(|(x, y)| (x - y).abs() / x).fold(0.0, f64::max);
            worst_printed = worst_printed.min(dev);
        }
    }
    let ok = worst <= 1e-6 && negatives > 0 && worst_printed > 1e-3;
    let detail = format!("max relative deviation {worst:.2e} over 50 specs ({negatives} negative speeds); u/|s| variant deviates by at least {worst_printed:.2e}");
    assert!(verdict(7, "speed rescaling invariance", ok, detail, start.elapsed(), 60.0));
}

#[test]
fn criterion_08_four_block_ground_truth() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = TimeGrid::real(0.25, 16).unwrap();
    let mode = FieldMode::RealPart;
    let freqs: Vec<f64> = (0..32).map(|_| rng.random_range(-6.0..6.0)).collect();
    let masses: Vec<f64> = (0..32).map(|_| rng.random_range(0.1..2.0)).collect();
    let params = json!({"blocks": [
        {"family": "moving_average", "params": {"geometric": {"rho": 0.5, "len": 8}}},
        {"family": "harmonizable", "params": {"frequencies": freqs, "masses": masses}},
        {"family": "sawtooth", "params": {"cells": 64}},
        {"family": "ergodic_random", "params": {"atoms": 48, "seed": 8}},
    ]});
    let alpha = AlphaSpec::new(1.2, mode).unwrap();
    let built = FamilyRegistry::with_builtins().build("concat", &params, grid, mode, alpha.alpha, ".").unwrap();
    let truth = built.truth.unwrap();
    let cfg = DetectionConfig::default();
    let c = classify_atoms(&built.kernel, &alpha, &cfg, None).unwrap();
    let mismatches = c.labels().iter().zip(&truth).filter(|(a, b)| a != b).count();
    let inclusions = check_inclusions(&c).is_ok();
    let probes = ProbeSet::default_suite(80, &grid, mode);
    let r = decompose_four(&built.kernel, &alpha, &probes, &cfg, None).unwrap();
    let mut block_sizes: Vec<usize> = r.components.iter().map(|c| c.atoms.len()).collect();
    block_sizes.sort();
    let per_probe = (0..probes.len())
        .map(|p| (r.components.iter().map(|c| c.sigma[p]).sum::<f64>() - r.whole_sigma[p]).abs() / r.whole_sigma[p])
        .fold(0.0, f64::max);
    let ok = mismatches == 0 && inclusions && per_probe <= 1e-10 && block_sizes[0] >= 32 && r.nonempty() == 4;
    let detail = format!("{} atoms, {mismatches} label mismatches, block sizes {block_sizes:?}, additivity residual {per_probe:.1e}", truth.len());
    assert!(verdict(8, "four-block classification", ok, detail, start.elapsed(), 30.0));
}

#[test]
fn criterion_09_periodic_paths() {
    let start = Instant::now();
    let grid = TimeGrid::real(0.125, 32).unwrap();
    let built = FamilyRegistry::with_builtins().build("sawtooth", &json!({"cells": 256}), grid, FieldMode::Real, 1.0, ".").unwrap();
    let alpha = AlphaSpec::new(1.0, FieldMode::Real).unwrap();
    let paths = lepage_simulate(&built.kernel, &alpha, &SimulationConfig::new(9, 10_000, 100)).unwrap();
    let d = period_difference(&paths, grid.lattice_steps(1.0).unwrap(), 1.0);
    let moving = period_difference(&paths, 1, grid.step).max_abs_difference;
    let ok = d.max_abs_difference == 0.0 && d.compared_pairs == 100 * (grid.len() - 8) && moving > 0.0;
    let detail = format!("max |X(t+1) - X(t)| = {} over {} pairs (one-step difference {moving:.3})", d.max_abs_difference, d.compared_pairs);
    assert!(verdict(9, "pathwise periodicity", ok, detail, start.elapsed(), 10.0));
}

#[test]
fn criterion_10_simulation_fidelity() {
    let start = Instant::now();
    let grid = TimeGrid::integer(8).unwrap();
    let registry = FamilyRegistry::with_builtins();
    let params = json!({"weights": [1.0, 0.4], "taps": [[1.0, -0.6, 0.3, 0.2], [0.5, 0.5, -1.0]]});
    let zero = grid.index_of(0.0).unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for alpha in [0.8, 1.2, 1.6] {
        let built = registry.build("moving_average", &params, grid, FieldMode::Real, alpha, ".").unwrap();
        let a = AlphaSpec::new(alpha, FieldMode::Real).unwrap();
        let sigma_a = scale_functional(&built.kernel, &a, &Probe::real(&[1.0], &[0.0])).unwrap();
        let n = 20_000;
        let x = lepage_simulate_at(&built.kernel, &a, &SimulationConfig::new(100 + (alpha * 10.0) as u64, 10_000, n), &[zero]).unwrap();
        let mut worst_z = 0.0f64;
        for theta in [0.5, 1.0, 2.0] {
            let c: Vec<f64> = x.column(0).iter().map(|v| (theta * v.re).cos()).collect();
            let mean = c.iter().sum::<f64>() / n as f64;
            let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            let se = (var / n as f64).sqrt();
            let exact = (-sigma_a * theta.powf(alpha)).exp();
            let zscore = (mean - exact).abs() / se;
            worst_z = worst_z.max(zscore);
            ok &= zscore <= 3.0;
        }
        details.push(format!("alpha {alpha}: max {worst_z:.2} SE"));
    }
    assert!(verdict(10, "characteristic function of X(0)", ok, details.join(", "), start.elapsed(), 60.0));
}

#[test]
fn criterion_11_minimality() {
    let start = Instant::now();
    let grid = TimeGrid::real(1.0 / 64.0, 80).unwrap();
    let registry = FamilyRegistry::with_builtins();
    let saw = registry.build("sawtooth", &json!({"cells": 256}), grid, FieldMode::Real, 1.0, ".").unwrap().kernel;
    let saw_minimal = check_minimality(&saw).unwrap() == Minimality::Minimal;

    let mut values = saw.values().clone();
    let col = values.column(17).to_owned();
    values.column_mut(200).assign(&col);
    let dup = KernelGrid::new(saw.space().clone(), grid, values, FieldMode::Real).unwrap();
    let dup_witness = check_minimality(&dup).unwrap() == Minimality::NotMinimal { first: 17, second: 200 };

    // product with an auxiliary space the kernel does not depend on
    let y_mass = 3.0f64;
    let scale = Complex64::new(y_mass.powf(-1.0), 0.0);
    let product = KernelGrid::concat(&[&saw, &saw, &saw], "y x sawtooth").unwrap();
    let product = (0..product.atom_count()).try_fold(product, |k, s| k.scale_column(s, scale)).unwrap();
    let product_witness = check_minimality(&product).unwrap() == Minimality::NotMinimal { first: 0, second: 256 };

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let int_grid = TimeGrid::integer(24).unwrap();
    let alpha = AlphaSpec::new(1.1, FieldMode::Complex).unwrap();
    let mut agreements = 0;
    let mut attempts = 0;
    while agreements < 20 && attempts < 200 {
        attempts += 1;
        let cycles = rng.random_range(1..=3);
        let mut map = Vec::new();
        for _ in 0..cycles {
            let len = rng.random_range(3..=6);
            let off = map.len();
            map.extend((0..len).map(|k| off + (k + 1) % len));
        }
        let n = map.len();
        let flow = PermutationFlow::new(WeightedAtomSpace::indexed((0..n).map(|_| rng.random_range(0.2..2.0)).collect(), "s").unwrap(), map).unwrap();
        let step = (0..n).map(|_| Phase::turns(rng.random_range(0..8), 8)).collect();
        let f0: Vec<Complex64> = (0..n).map(|_| random_value(&mut rng, true)).collect();
        let k = flow_generated_kernel(&f0, &flow, &StepCocycle { flow: flow.clone(), step }, &int_grid, FieldMode::Complex, alpha.alpha).unwrap();
        if check_minimality(&k).unwrap() != Minimality::Minimal {
            continue;
        }
        if flow_point_agreement(&k, &flow, &alpha, &DetectionConfig::default()).unwrap().passed {
            agreements += 1;
        } else {
            break;
        }
    }
    let ok = saw_minimal && dup_witness && product_witness && agreements == 20;
    let detail = format!(
        "sawtooth minimal {saw_minimal}, duplicate witness {dup_witness}, product witness {product_witness}, flow agreement {agreements}/20 in {attempts} draws"
    );
    assert!(verdict(11, "minimality", ok, detail, start.elapsed(), 10.0));
}

#[test]
fn criterion_12_c0() {
    let start = Instant::now();
    let at_one = (c0_constant(1.0).unwrap() - 2.0 / PI).abs();
    let mut worst = 0.0f64;
    for k in 1..=7 {
        let alpha = 0.25 * k as f64;
        worst = worst.max((c0_constant(alpha).unwrap() - c0_constant_tanh_sinh(alpha).unwrap()).abs());
    }
    let ok = at_one <= 1e-10 && worst <= 1e-10;
    assert!(verdict(12, "c0 constant", ok, format!("|c0(1) - 2/pi| = {at_one:.1e}, rule disagreement {worst:.1e}"), start.elapsed(), 1.0));
}
