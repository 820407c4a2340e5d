use num_complex::Complex64;
use serde::Serialize;

use super::DetectionConfig;
use crate::error::{Error, Result};
use crate::kernels::KernelGrid;

/// Witness of `f_{t+h}(s) = a f_t(s)` on the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodCertificate {
    pub atom: usize,
    pub h: f64,
    pub h_steps: i64,
    pub a: Complex64,
    /// `max_t |f_{t+h} - a f_t| / max_t |f_t|` over all grid pairs.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TailVerdict {
    Dissipative,
    Conservative,
    Undecided,
}

/// Partial sums of `|f_t|^alpha step` over windows around the column's peak.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub verdict: TailVerdict,
    /// Set when a period certificate decided the verdict.
    pub by_period: bool,
    pub peak_time: f64,
    pub radii: [usize; 3],
    pub partial_sums: [f64; 3],
}

pub(crate) fn column_max(kernel: &KernelGrid, atom: usize) -> Result<f64> {
    if atom >= kernel.atom_count() {
        return Err(Error::AtomOutOfRange(atom));
    }
    Ok(kernel.column(atom).iter().map(|v| v.norm()).fold(0.0, f64::max))
}

fn support_checked(kernel: &KernelGrid, atom: usize, config: &DetectionConfig) -> Result<f64> {
    let max = column_max(kernel, atom)?;
    if max <= config.eps_zero {
        return Err(Error::SupportViolation(atom));
    }
    Ok(max)
}

/// Fraction of grid times where `|f_t(s)| > eps_zero`.
pub fn usable_fraction(kernel: &KernelGrid, atom: usize, config: &DetectionConfig) -> Result<f64> {
    support_checked(kernel, atom, config)?;
    let usable = kernel.column(atom).iter().filter(|v| v.norm() > config.eps_zero).count();
    Ok(usable as f64 / kernel.grid().len() as f64)
}

/// Shifts `1, -1, 2, -2, ...` grid steps up to `max_steps`.
pub fn default_candidates(max_steps: usize) -> Vec<i64> {
    (1..=max_steps as i64).flat_map(|h| [h, -h]).collect()
}

/// Tests one shift; `None` unless the fitted multiplier is nonzero and the residual is
/// within `eps_period`.
pub fn test_shift(kernel: &KernelGrid, atom: usize, h_steps: i64, config: &DetectionConfig) -> Result<Option<PeriodCertificate>> {
    let max = support_checked(kernel, atom, config)?;
    if h_steps == 0 {
        return Err(Error::InvalidSpec("period candidates must be nonzero".into()));
    }
    let col = kernel.column(atom);
    let n = col.len() as i64;
    let pairs = || (0..n).filter(move |&i| (0..n).contains(&(i + h_steps))).map(move |i| (i as usize, (i + h_steps) as usize));
    let Some((ti, _)) = pairs().filter(|&(i, _)| col[i].norm() > config.eps_zero).max_by(|a, b| {
        col[a.0].norm().total_cmp(&col[b.0].norm()).then(b.0.cmp(&a.0))
    }) else {
        return Ok(None);
    };
    let target = col[(ti as i64 + h_steps) as usize];
    if target.norm() <= config.eps_zero {
        return Ok(None);
    }
    let a = target / col[ti];
    let mut residual = 0.0f64;
    for (i, j) in pairs() {
        residual = residual.max((col[j] - a * col[i]).norm() / max);
        if residual > config.eps_period {
            return Ok(None);
        }
    }
    Ok(Some(PeriodCertificate { atom, h: kernel.grid().steps_to_time(h_steps), h_steps, a, residual }))
}

/// First certified shift among `candidates` (in grid steps, tried in order). Atoms whose
/// usable support is below the configured fraction get no certificate.
pub fn detect_period(kernel: &KernelGrid, atom: usize, candidates: &[i64], config: &DetectionConfig) -> Result<Option<PeriodCertificate>> {
    if usable_fraction(kernel, atom, config)? < config.min_usable_fraction {
        return Ok(None);
    }
    for &h in candidates {
        if let Some(cert) = test_shift(kernel, atom, h, config)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// One grid step is a period (with any multiplier). When it is, the product identity
/// `f_{t1+t2} f_0 = f_{t1} f_{t2}` is cross-checked on the central half of the grid.
pub fn detect_fixed(kernel: &KernelGrid, atom: usize, config: &DetectionConfig) -> Result<Option<PeriodCertificate>> {
    if usable_fraction(kernel, atom, config)? < config.min_usable_fraction {
        return Ok(None);
    }
    let Some(cert) = test_shift(kernel, atom, 1, config)? else {
        return Ok(None);
    };
    let grid = kernel.grid();
    let col = kernel.column(atom);
    let max = column_max(kernel, atom)?;
    let zero = grid.index_of_steps(0).expect("0 is on every grid");
    let half = grid.half_window as i64 / 2;
    let mut residual = 0.0f64;
    for t1 in -half..=half {
        for t2 in -half..=half {
            let (Some(i1), Some(i2), Some(i12)) = (grid.index_of_steps(t1), grid.index_of_steps(t2), grid.index_of_steps(t1 + t2)) else {
                continue;
            };
            residual = residual.max((col[i12] * col[zero] - col[i1] * col[i2]).norm() / (max * max));
        }
    }
    if residual > config.eps_period {
        return Err(Error::FixedCrossCheck { atom, residual });
    }
    Ok(Some(cert))
}

/// Dissipative/conservative verdict. A period certificate forces CONSERVATIVE; otherwise
/// the tail mass outside the inner window decides.
pub fn detect_dissipative(
    kernel: &KernelGrid,
    atom: usize,
    alpha: f64,
    certificate: Option<&PeriodCertificate>,
    config: &DetectionConfig,
) -> Result<TailReport> {
    support_checked(kernel, atom, config)?;
    let grid = kernel.grid();
    let col = kernel.column(atom);
    let n = col.len();
    let peak = (0..n).fold(0, |best, i| if col[i].norm() > col[best].norm() { i } else { best });
    let w = grid.half_window;
    let radii = [(w / 4).max(1), (w / 2).max(1), w];
    let mut sums = [0.0; 3];
    for (k, &r) in radii.iter().enumerate() {
        let lo = peak.saturating_sub(r);
        let hi = (peak + r).min(n - 1);
        sums[k] = (lo..=hi).map(|i| col[i].norm().powf(alpha)).sum::<f64>() * grid.cell_mass();
    }
    let peak_time = grid.time(peak);
    if certificate.is_some() {
        return Ok(TailReport { verdict: TailVerdict::Conservative, by_period: true, peak_time, radii, partial_sums: sums });
    }
    let total = sums[2];
    let inc_inner = (sums[1] - sums[0]) / total;
    let inc_outer = (sums[2] - sums[1]) / total;
    let verdict = if inc_outer <= config.eps_tail && inc_outer <= inc_inner {
        TailVerdict::Dissipative
    } else if inc_inner >= config.conservative_increment && inc_outer >= config.conservative_increment {
        TailVerdict::Conservative
    } else {
        TailVerdict::Undecided
    };
    Ok(TailReport { verdict, by_period: false, peak_time, radii, partial_sums: sums })
}
