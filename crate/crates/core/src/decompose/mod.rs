//! Component sets of a kernel and the four-way decomposition.
//!
//! Labels follow the order dissipative, then fixed, then cyclic, then conservative
//! nonperiodic. On a real-time grid "fixed" means that a single grid step is a period.

mod detect;
mod four;

pub use detect::{
    default_candidates, detect_dissipative, detect_fixed, detect_period, test_shift, usable_fraction, PeriodCertificate,
    TailReport, TailVerdict,
};
pub use four::{
    classify_process, decompose_four, flow_point_agreement, AgreementReport, Component, DecompositionResult, ProcessVerdict,
};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelGrid;
use crate::stable::AlphaSpec;

/// Thresholds of the grid tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionConfig {
    /// Values at or below this magnitude are treated as zero.
    pub eps_zero: f64,
    /// Relative residual allowed in `f_{t+h} = a f_t`.
    pub eps_period: f64,
    /// Outer-window increment, relative to the full window, below which an atom is dissipative.
    pub eps_tail: f64,
    /// Atoms with fewer usable grid times than this fraction are undecided unless dissipative.
    pub min_usable_fraction: f64,
    /// Relative increment of both outer windows above which an atom is conservative.
    pub conservative_increment: f64,
    /// Largest candidate period in grid steps; defaults to the half window.
    pub max_period_steps: Option<usize>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            eps_zero: 1e-12,
            eps_period: 1e-9,
            eps_tail: 1e-8,
            min_usable_fraction: 0.25,
            conservative_increment: 0.05,
            max_period_steps: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentLabel {
    Dissipative,
    FixedHarmonizable,
    Cyclic,
    ConservativeNonperiodic,
}

impl ComponentLabel {
    pub const ALL: [ComponentLabel; 4] = [
        ComponentLabel::Dissipative,
        ComponentLabel::FixedHarmonizable,
        ComponentLabel::Cyclic,
        ComponentLabel::ConservativeNonperiodic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ComponentLabel::Dissipative => "DISSIPATIVE",
            ComponentLabel::FixedHarmonizable => "FIXED_HARMONIZABLE",
            ComponentLabel::Cyclic => "CYCLIC",
            ComponentLabel::ConservativeNonperiodic => "CONSERVATIVE_NONPERIODIC",
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, ComponentLabel::FixedHarmonizable | ComponentLabel::Cyclic)
    }
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ComponentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        ComponentLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == norm)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown component label `{s}`")))
    }
}

/// Everything the detectors found about one atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomReport {
    pub atom: usize,
    /// `None` while undecided.
    pub detected: Option<ComponentLabel>,
    pub label: ComponentLabel,
    pub overridden: bool,
    pub usable_fraction: f64,
    pub period: Option<PeriodCertificate>,
    pub fixed: Option<PeriodCertificate>,
    pub tail: TailReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomClassification {
    pub atoms: Vec<AtomReport>,
    /// Atoms the detectors could not decide (all of them carry the override label).
    pub undecided: Vec<usize>,
    pub config: DetectionConfig,
}

impl AtomClassification {
    pub fn labels(&self) -> Vec<ComponentLabel> {
        self.atoms.iter().map(|a| a.label).collect()
    }

    pub fn mask(&self, label: ComponentLabel) -> Vec<bool> {
        self.atoms.iter().map(|a| a.label == label).collect()
    }

    pub fn count(&self, label: ComponentLabel) -> usize {
        self.atoms.iter().filter(|a| a.label == label).count()
    }
}

fn classify_one(kernel: &KernelGrid, atom: usize, alpha: f64, config: &DetectionConfig) -> Result<(Option<ComponentLabel>, AtomReport)> {
    let max_steps = config.max_period_steps.unwrap_or(kernel.grid().half_window).min(kernel.grid().len() - 1);
    let usable = usable_fraction(kernel, atom, config)?;
    let period = detect_period(kernel, atom, &default_candidates(max_steps), config)?;
    let tail = detect_dissipative(kernel, atom, alpha, period.as_ref(), config)?;
    let mut fixed = None;
    let detected = match tail.verdict {
        TailVerdict::Dissipative => Some(ComponentLabel::Dissipative),
        TailVerdict::Undecided => None,
        TailVerdict::Conservative if usable < config.min_usable_fraction => None,
        TailVerdict::Conservative => {
            fixed = detect_fixed(kernel, atom, config)?;
            Some(if fixed.is_some() {
                ComponentLabel::FixedHarmonizable
            } else if period.is_some() {
                ComponentLabel::Cyclic
            } else {
                ComponentLabel::ConservativeNonperiodic
            })
        }
    };
    let report = AtomReport {
        atom,
        detected,
        label: detected.unwrap_or(ComponentLabel::ConservativeNonperiodic),
        overridden: false,
        usable_fraction: usable,
        period,
        fixed,
        tail,
    };
    Ok((detected, report))
}

/// Labels every atom. Undecided atoms are an error unless `override_label` is given, in
/// which case they receive it and are listed in `undecided`.
pub fn classify_atoms(
    kernel: &KernelGrid,
    alpha: &AlphaSpec,
    config: &DetectionConfig,
    override_label: Option<ComponentLabel>,
) -> Result<AtomClassification> {
    alpha.validate()?;
    if let Some(atom) = kernel.zero_column() {
        return Err(Error::SupportViolation(atom));
    }
    let results = (0..kernel.atom_count())
        .into_par_iter()
        .map(|s| classify_one(kernel, s, alpha.alpha, config))
        .collect::<Result<Vec<_>>>()?;
    let undecided: Vec<usize> = results.iter().filter(|(d, _)| d.is_none()).map(|(_, r)| r.atom).collect();
    if !undecided.is_empty() && override_label.is_none() {
        return Err(Error::Undecided { atoms: undecided });
    }
    let atoms = results
        .into_iter()
        .map(|(d, mut r)| {
            if d.is_none() {
                r.label = override_label.expect("checked above");
                r.overridden = true;
            }
            r
        })
        .collect();
    let classification = AtomClassification { atoms, undecided, config: *config };
    check_inclusions(&classification)?;
    Ok(classification)
}

/// `C_F` inside `C_P` (fixed atoms carry a period) and `C_P` inside `C` (no certified atom
/// is dissipative).
pub fn check_inclusions(c: &AtomClassification) -> Result<()> {
    for a in &c.atoms {
        if a.overridden {
            continue;
        }
        if a.label == ComponentLabel::FixedHarmonizable && a.period.is_none() {
            return Err(Error::InclusionViolation(format!("atom {} is fixed without a period certificate", a.atom)));
        }
        if a.label == ComponentLabel::Dissipative && a.period.is_some() {
            return Err(Error::InclusionViolation(format!("atom {} is periodic and dissipative", a.atom)));
        }
        if a.label == ComponentLabel::Cyclic && (a.period.is_none() || a.fixed.is_some()) {
            return Err(Error::InclusionViolation(format!("atom {} is cyclic without a non-fixed period", a.atom)));
        }
    }
    Ok(())
}
