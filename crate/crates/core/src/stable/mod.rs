//! Scale functionals, distributional checks and LePage path simulation.

mod constants;
mod scale;
mod simulate;

pub use constants::{c0_constant, c0_constant_tanh_sinh, series_constant};
pub use scale::{
    check_equal_in_distribution, check_stationarity, scale_functional, scale_functionals, EqualityReport, EqualityRow,
    StationarityReport, StationarityRow,
};
pub use simulate::{
    lepage_simulate, lepage_simulate_at, pathwise_period_diagnostic, period_difference, PeriodDiagnostic,
    SimulationConfig, TailCorrection,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mode::FieldMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSpec {
    pub alpha: f64,
    pub field_mode: FieldMode,
}

impl AlphaSpec {
    pub fn new(alpha: f64, field_mode: FieldMode) -> Result<Self> {
        constants::check_alpha(alpha)?;
        Ok(Self { alpha, field_mode })
    }

    pub fn validate(&self) -> Result<()> {
        constants::check_alpha(self.alpha)
    }
}
