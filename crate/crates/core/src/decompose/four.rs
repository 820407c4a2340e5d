use serde::Serialize;

use super::{classify_atoms, AtomClassification, ComponentLabel, DetectionConfig};
use crate::error::{Error, Result};
use crate::flows::{classify_points, AtomFlow, PermutationFlow, PointLabel};
use crate::kernels::{check_minimality, KernelGrid, Minimality};
use crate::measure_space::ProbeSet;
use crate::stable::{check_stationarity, scale_functionals, AlphaSpec, StationarityReport};

#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub label: ComponentLabel,
    pub atoms: Vec<usize>,
    #[serde(skip)]
    pub kernel: KernelGrid,
    pub sigma: Vec<f64>,
    pub stationarity: StationarityReport,
}

impl Component {
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionResult {
    pub classification: AtomClassification,
    /// One component per label, in the order of [`ComponentLabel::ALL`].
    pub components: Vec<Component>,
    pub whole_sigma: Vec<f64>,
    /// `max_probe |sum_components sigma - sigma| / sigma`.
    pub additivity_residual: f64,
    pub shifts: Vec<f64>,
}

impl DecompositionResult {
    pub fn component(&self, label: ComponentLabel) -> &Component {
        self.components.iter().find(|c| c.label == label).expect("all four components are present")
    }

    pub fn nonempty(&self) -> usize {
        self.components.iter().filter(|c| !c.is_empty()).count()
    }

    pub fn max_stationarity_deviation(&self) -> f64 {
        self.components.iter().map(|c| c.stationarity.max_relative_deviation).fold(0.0, f64::max)
    }
}

/// Largest additivity residual accepted by [`decompose_four`].
pub const ADDITIVITY_TOL: f64 = 1e-10;

/// Shifts of `1, 2, 3, 5` grid steps in both directions that keep every probe on the grid.
fn admissible_shifts(kernel: &KernelGrid, probes: &ProbeSet) -> Vec<f64> {
    let grid = kernel.grid();
    [1i64, -1, 2, -2, 3, -3, 5, -5]
        .into_iter()
        .map(|k| grid.steps_to_time(k))
        .filter(|&h| probes.entries.iter().all(|p| p.times.iter().all(|&t| grid.index_of(t + h).is_ok())))
        .collect()
}

/// Splits the kernel into its dissipative, fixed, cyclic and conservative nonperiodic
/// parts and checks that the scale functionals add up.
pub fn decompose_four(
    kernel: &KernelGrid,
    alpha: &AlphaSpec,
    probes: &ProbeSet,
    config: &DetectionConfig,
    override_label: Option<ComponentLabel>,
) -> Result<DecompositionResult> {
    let classification = classify_atoms(kernel, alpha, config, override_label)?;
    let whole_sigma = scale_functionals(kernel, alpha, probes)?;
    let shifts = admissible_shifts(kernel, probes);
    let mut components = Vec::with_capacity(4);
    for label in ComponentLabel::ALL {
        let mask = classification.mask(label);
        let atoms: Vec<usize> = (0..mask.len()).filter(|&s| mask[s]).collect();
        let sub = kernel.restrict(&mask)?;
        let sigma = scale_functionals(&sub, alpha, probes)?;
        let stationarity = check_stationarity(&sub, alpha, probes, &shifts)?;
        components.push(Component { label, atoms, kernel: sub, sigma, stationarity });
    }
    let mut residual = 0.0f64;
    for (p, &whole) in whole_sigma.iter().enumerate() {
        let parts: f64 = components.iter().map(|c| c.sigma[p]).sum();
        let d = (parts - whole).abs();
        if d > 0.0 {
            residual = residual.max(if whole > 0.0 { d / whole } else { f64::INFINITY });
        }
    }
    if residual > ADDITIVITY_TOL {
        return Err(Error::AdditivityResidual(residual));
    }
    Ok(DecompositionResult { classification, components, whole_sigma, additivity_residual: residual, shifts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProcessVerdict {
    Periodic,
    Cyclic,
    HarmonizableOrTrivial,
    Mixed,
    None,
}

impl ProcessVerdict {
    /// The most specific verdict that fits the labels.
    pub fn from_labels(labels: &[ComponentLabel]) -> Self {
        let periodic = labels.iter().filter(|l| l.is_periodic()).count();
        let fixed = labels.iter().filter(|&&l| l == ComponentLabel::FixedHarmonizable).count();
        let n = labels.len();
        if periodic == 0 {
            ProcessVerdict::None
        } else if periodic < n {
            ProcessVerdict::Mixed
        } else if fixed == n {
            ProcessVerdict::HarmonizableOrTrivial
        } else if fixed == 0 {
            ProcessVerdict::Cyclic
        } else {
            ProcessVerdict::Periodic
        }
    }
}

pub fn classify_process(
    kernel: &KernelGrid,
    alpha: &AlphaSpec,
    config: &DetectionConfig,
    override_label: Option<ComponentLabel>,
) -> Result<(ProcessVerdict, AtomClassification)> {
    let c = classify_atoms(kernel, alpha, config, override_label)?;
    Ok((ProcessVerdict::from_labels(&c.labels()), c))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub kernel_labels: Vec<ComponentLabel>,
    pub flow_labels: Vec<PointLabel>,
    pub mismatches: Vec<usize>,
    pub passed: bool,
}

/// Compares kernel-side fixed/cyclic labels with the fixed/cyclic points of the flow
/// that generated the kernel. Only meaningful for minimal kernels.
pub fn flow_point_agreement(
    kernel: &KernelGrid,
    flow: &PermutationFlow,
    alpha: &AlphaSpec,
    config: &DetectionConfig,
) -> Result<AgreementReport> {
    if kernel.atom_count() != flow.atom_count() {
        return Err(Error::MaskLength { expected: flow.atom_count(), got: kernel.atom_count() });
    }
    if let Minimality::NotMinimal { first, second } = check_minimality(kernel)? {
        return Err(Error::NotMinimal(first, second));
    }
    let classification = classify_atoms(kernel, alpha, config, None)?;
    let points = classify_points(flow, flow.atom_count());
    let kernel_labels = classification.labels();
    let mismatches: Vec<usize> = kernel_labels
        .iter()
        .zip(&points.labels)
        .enumerate()
        .filter(|(_, (k, f))| {
            let expected = match f {
                PointLabel::Fixed => Some(ComponentLabel::FixedHarmonizable),
                PointLabel::Cyclic => Some(ComponentLabel::Cyclic),
                PointLabel::Nonperiodic => None,
            };
            match expected {
                Some(e) => **k != e,
                None => k.is_periodic(),
            }
        })
        .map(|(s, _)| s)
        .collect();
    Ok(AgreementReport { kernel_labels, flow_labels: points.labels, passed: mismatches.is_empty(), mismatches })
}
