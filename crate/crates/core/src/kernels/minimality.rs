use serde::Serialize;

use super::KernelGrid;
use crate::error::{Error, Result};

/// Relative tolerance when comparing column ratios.
pub const RATIO_TOL: f64 = 1e-9;
const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Minimality {
    Minimal,
    /// Atoms whose columns are proportional on a common support, so no ratio
    /// `f_t / f_u` tells them apart.
    NotMinimal { first: usize, second: usize },
}

impl Minimality {
    pub fn is_minimal(&self) -> bool {
        matches!(self, Minimality::Minimal)
    }
}

/// Two atoms are separated unless they have the same support (entries above `1e-12`) and
/// proportional columns to `RATIO_TOL`. Returns the lexicographically first unseparated pair.
pub fn check_minimality(kernel: &KernelGrid) -> Result<Minimality> {
    if let Some(atom) = kernel.zero_column() {
        return Err(Error::SupportViolation(atom));
    }
    let n = kernel.atom_count();
    let supports: Vec<Vec<bool>> =
        (0..n).map(|s| kernel.column(s).iter().map(|v| v.norm() > SUPPORT_TOL).collect()).collect();
    let peaks: Vec<(usize, f64)> = (0..n)
        .map(|s| {
            kernel.column(s).iter().map(|v| v.norm()).enumerate().fold((0, 0.0), |best, (i, m)| if m > best.1 { (i, m) } else { best })
        })
        .collect();
    for a in 0..n {
        for b in (a + 1)..n {
            if supports[a] != supports[b] || !supports[a].iter().any(|&x| x) {
                continue;
            }
            let (r, _) = peaks[a];
            let lambda = kernel.value(r, b) / kernel.value(r, a);
            let scale = peaks[b].1;
            let proportional = kernel
                .column(a)
                .iter()
                .zip(kernel.column(b).iter())
                .all(|(&fa, &fb)| (fb - lambda * fa).norm() <= RATIO_TOL * scale);
            if proportional {
                return Ok(Minimality::NotMinimal { first: a, second: b });
            }
        }
    }
    Ok(Minimality::Minimal)
}
