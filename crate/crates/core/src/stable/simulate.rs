use ndarray::Array2;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{series_constant, AlphaSpec};
use crate::error::{Error, Result};
use crate::kernels::KernelGrid;
use crate::mode::FieldMode;

/// How the part of the series beyond `series_terms` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailCorrection {
    /// Plain truncation.
    None,
    /// Gaussian surrogate with the conditional covariance of the dropped terms given `Gamma_N`.
    #[default]
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub seed: u64,
    pub series_terms: usize,
    pub paths: usize,
    #[serde(default)]
    pub tail: TailCorrection,
}

impl SimulationConfig {
    pub fn new(seed: u64, series_terms: usize, paths: usize) -> Self {
        Self { seed, series_terms, paths, tail: TailCorrection::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.series_terms == 0 {
            return Err(Error::InvalidSimulation("series_terms must be at least 1".into()));
        }
        if self.paths == 0 {
            return Err(Error::InvalidSimulation("paths must be at least 1".into()));
        }
        Ok(())
    }
}

/// Simulated paths at every grid time, one row per path. Real modes have zero imaginary
/// part; `RealPart` keeps the real part of the complex integral.
pub fn lepage_simulate(kernel: &KernelGrid, alpha: &AlphaSpec, config: &SimulationConfig) -> Result<Array2<Complex64>> {
    let rows: Vec<usize> = (0..kernel.grid().len()).collect();
    lepage_simulate_at(kernel, alpha, config, &rows)
}

/// As [`lepage_simulate`] restricted to the given time rows. Path `p` uses the ChaCha
/// stream `p` of `seed`, so results do not depend on the thread count.
///
/// `X(t) = (C_alpha m)^{1/alpha} sum_j eps_j Gamma_j^{-1/alpha} f_t(S_j)`, `S_j ~ weight / m`.
pub fn lepage_simulate_at(kernel: &KernelGrid, alpha: &AlphaSpec, config: &SimulationConfig, rows: &[usize]) -> Result<Array2<Complex64>> {
    alpha.validate()?;
    config.validate()?;
    if kernel.mode() != alpha.field_mode {
        return Err(Error::ModeMismatch("alpha spec and kernel disagree on the field".into()));
    }
    if let Some(&r) = rows.iter().find(|&&r| r >= kernel.grid().len()) {
        return Err(Error::InvalidSimulation(format!("time row {r} outside the grid")));
    }
    let weights = kernel.space().weights();
    let mass: f64 = weights.iter().sum();
    if kernel.atom_count() == 0 || !(mass > 0.0) || kernel.values().iter().all(|v| v.norm() == 0.0) {
        return Err(Error::DegenerateKernel);
    }
    let sampler = WeightedIndex::new(weights).map_err(|_| Error::DegenerateKernel)?;
    let a = alpha.alpha;
    let amplitude = (series_constant(a)? * mass).powf(1.0 / a);
    let complex = alpha.field_mode != FieldMode::Real;
    let probabilities: Vec<f64> = weights.iter().map(|w| w / mass).collect();
    let columns: Vec<Vec<Complex64>> =
        (0..kernel.atom_count()).map(|s| rows.iter().map(|&r| kernel.value(r, s)).collect()).collect();

    let paths: Vec<Vec<Complex64>> = (0..config.paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(p as u64);
            let mut x = vec![Complex64::new(0.0, 0.0); rows.len()];
            let mut gamma = 0.0;
            for _ in 0..config.series_terms {
                gamma += rng.sample::<f64, _>(Exp1);
                let s = sampler.sample(&mut rng);
                let sign = if complex {
                    Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
                } else if rng.random::<bool>() {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(-1.0, 0.0)
                };
                let c = sign * gamma.powf(-1.0 / a);
                for (xi, f) in x.iter_mut().zip(&columns[s]) {
                    *xi += c * f;
                }
            }
            for xi in x.iter_mut() {
                *xi *= amplitude;
            }
            if config.tail == TailCorrection::Gaussian {
                // Given Gamma_N = g, the dropped terms have covariance
                // kappa sum_s p_s f_t(s) conj(f_u(s)), kappa = (C m)^{2/alpha} g^{1-2/alpha} / (2/alpha - 1).
                let kappa = amplitude * amplitude * gamma.powf(1.0 - 2.0 / a) / (2.0 / a - 1.0);
                let root = kappa.sqrt();
                for (s, col) in columns.iter().enumerate() {
                    let z = if complex {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                    } else {
                        Complex64::new(rng.sample(StandardNormal), 0.0)
                    };
                    let c = z * root * probabilities[s].sqrt();
                    for (xi, f) in x.iter_mut().zip(col) {
                        *xi += c * f;
                    }
                }
            }
            if alpha.field_mode == FieldMode::RealPart {
                for xi in x.iter_mut() {
                    xi.im = 0.0;
                }
            }
            x
        })
        .collect();
    Ok(Array2::from_shape_fn((config.paths, rows.len()), |(p, i)| paths[p][i]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodDiagnostic {
    pub period: f64,
    pub period_steps: i64,
    pub compared_pairs: usize,
    /// `max |X(t + period) - X(t)|` over paths and grid times.
    pub max_abs_difference: f64,
}

/// Simulates paths and measures how far they are from repeating after `period`.
pub fn pathwise_period_diagnostic(kernel: &KernelGrid, alpha: &AlphaSpec, config: &SimulationConfig, period: f64) -> Result<PeriodDiagnostic> {
    let grid = kernel.grid();
    let steps = grid.lattice_steps(period)?;
    if !grid.contains_steps(steps) {
        return Err(Error::OffGrid { time: period });
    }
    let paths = lepage_simulate(kernel, alpha, config)?;
    Ok(period_difference(&paths, steps, period))
}

pub fn period_difference(paths: &Array2<Complex64>, steps: i64, period: f64) -> PeriodDiagnostic {
    let n = paths.ncols() as i64;
    let mut max = 0.0f64;
    let mut pairs = 0;
    for row in paths.rows() {
        for i in 0..n {
            let j = i + steps;
            if (0..n).contains(&j) {
                max = max.max((row[j as usize] - row[i as usize]).norm());
                pairs += 1;
            }
        }
    }
    PeriodDiagnostic { period, period_steps: steps, compared_pairs: pairs, max_abs_difference: max }
}
