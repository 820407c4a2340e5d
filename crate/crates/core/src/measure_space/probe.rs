use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TimeGrid;
use crate::error::{Error, Result};
use crate::mode::FieldMode;

/// One linear combination `sum_k theta_k X(t_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub thetas: Vec<Complex64>,
    pub times: Vec<f64>,
}

impl Probe {
    pub fn real(thetas: &[f64], times: &[f64]) -> Self {
        Self { thetas: thetas.iter().map(|&x| Complex64::new(x, 0.0)).collect(), times: times.to_vec() }
    }

    pub fn complex(thetas: &[Complex64], times: &[f64]) -> Self {
        Self { thetas: thetas.to_vec(), times: times.to_vec() }
    }

    pub fn validate(&self, grid: &TimeGrid, mode: FieldMode) -> Result<()> {
        if self.thetas.is_empty() || self.thetas.len() != self.times.len() {
            return Err(Error::InvalidProbe(format!(
                "{} coefficients for {} times",
                self.thetas.len(),
                self.times.len()
            )));
        }
        if mode.real_probes() && self.thetas.iter().any(|c| c.im != 0.0) {
            return Err(Error::ModeMismatch("complex coefficient in a real-mode probe".into()));
        }
        if self.thetas.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidProbe("non-finite coefficient".into()));
        }
        for &t in &self.times {
            grid.index_of(t)?;
        }
        Ok(())
    }

    /// Same coefficients at times shifted by `h`.
    pub fn shifted(&self, h: f64) -> Probe {
        Probe { thetas: self.thetas.clone(), times: self.times.iter().map(|t| t + h).collect() }
    }

    pub fn scaled(&self, c: Complex64) -> Probe {
        Probe { thetas: self.thetas.iter().map(|t| t * c).collect(), times: self.times.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProbeSet {
    pub entries: Vec<Probe>,
}

impl ProbeSet {
    pub fn new(entries: Vec<Probe>) -> Self {
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validate(&self, grid: &TimeGrid, mode: FieldMode) -> Result<()> {
        self.entries.iter().try_for_each(|p| p.validate(grid, mode))
    }

    /// Random probes with 1..=`max_len` terms, coefficients in the unit ball and times
    /// drawn from grid nodes with `|steps| <= max_steps`.
    pub fn random(seed: u64, count: usize, max_len: usize, grid: &TimeGrid, mode: FieldMode, max_steps: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reach = max_steps.min(grid.half_window) as i64;
        let entries = (0..count)
            .map(|_| {
                let len = rng.random_range(1..=max_len.max(1));
                let mut thetas = Vec::with_capacity(len);
                let mut times = Vec::with_capacity(len);
                for _ in 0..len {
                    thetas.push(unit_ball_sample(&mut rng, mode));
                    times.push(grid.steps_to_time(rng.random_range(-reach..=reach)));
                }
                Probe { thetas, times }
            })
            .collect();
        Self { entries }
    }

    /// Default suite: 32 probes of 1-4 terms within the inner half of the grid.
    pub fn default_suite(seed: u64, grid: &TimeGrid, mode: FieldMode) -> Self {
        Self::random(seed, 32, 4, grid, mode, grid.half_window / 2)
    }
}

fn unit_ball_sample<R: Rng>(rng: &mut R, mode: FieldMode) -> Complex64 {
    if mode.real_probes() {
        Complex64::new(rng.random_range(-1.0..=1.0), 0.0)
    } else {
        loop {
            let z = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            if z.norm_sqr() <= 1.0 {
                return z;
            }
        }
    }
}
