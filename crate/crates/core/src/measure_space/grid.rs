use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack when snapping a real time to a grid node.
const GRID_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TimeMode {
    /// `T = Z`, counting measure, step forced to 1.
    Integer,
    /// `T = R` sampled on a uniform grid, Lebesgue measure.
    RealGrid,
}

/// Symmetric grid `-half_window*step ..= half_window*step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub mode: TimeMode,
    pub step: f64,
    pub half_window: usize,
}

impl TimeGrid {
    pub fn new(mode: TimeMode, step: f64, half_window: usize) -> Result<Self> {
        if half_window == 0 {
            return Err(Error::InvalidGrid("half_window must be positive".into()));
        }
        let step = match mode {
            TimeMode::Integer => 1.0,
            TimeMode::RealGrid => {
                if !(step > 0.0 && step.is_finite()) {
                    return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
                }
                step
            }
        };
        Ok(Self { mode, step, half_window })
    }

    pub fn integer(half_window: usize) -> Result<Self> {
        Self::new(TimeMode::Integer, 1.0, half_window)
    }

    pub fn real(step: f64, half_window: usize) -> Result<Self> {
        Self::new(TimeMode::RealGrid, step, half_window)
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.mode, self.step, self.half_window).and_then(|g| {
            if g.step == self.step {
                Ok(())
            } else {
                Err(Error::InvalidGrid("INTEGER mode requires step 1".into()))
            }
        })
    }

    pub fn len(&self) -> usize {
        2 * self.half_window + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// λ-mass of one grid cell: 1 for counting measure, `step` for Lebesgue.
    pub fn cell_mass(&self) -> f64 {
        self.step
    }

    pub fn time(&self, index: usize) -> f64 {
        self.steps_to_time(index as i64 - self.half_window as i64)
    }

    pub fn steps_to_time(&self, steps: i64) -> f64 {
        steps as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    /// Integer number of steps from 0, if `t` lies on the infinite lattice `step*Z`.
    pub fn lattice_steps(&self, t: f64) -> Result<i64> {
        let x = t / self.step;
        let n = x.round();
        if !x.is_finite() || (x - n).abs() > GRID_SNAP * x.abs().max(1.0) {
            return Err(Error::OffGrid { time: t });
        }
        Ok(n as i64)
    }

    pub fn contains_steps(&self, steps: i64) -> bool {
        steps.unsigned_abs() <= self.half_window as u64
    }

    pub fn index_of_steps(&self, steps: i64) -> Option<usize> {
        self.contains_steps(steps).then(|| (steps + self.half_window as i64) as usize)
    }

    pub fn index_of(&self, t: f64) -> Result<usize> {
        let n = self.lattice_steps(t)?;
        self.index_of_steps(n).ok_or(Error::OffGrid { time: t })
    }

    pub fn steps_of_index(&self, index: usize) -> i64 {
        index as i64 - self.half_window as i64
    }
}
