//! Named kernel constructions, looked up by string and built from JSON parameters.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::decompose::ComponentLabel;
use crate::error::{Error, Result};
use crate::flows::{Phase, PermutationFlow};
use crate::kernels::KernelGrid;
use crate::measure_space::TimeGrid;
use crate::mode::FieldMode;

mod builtin;

pub use builtin::{
    ConcatFamily, CosHarmonizableFamily, ErgodicRandomFamily, FlowGeneratedFamily, GridCsvFamily, HarmonizableFamily, MovingAverageFamily,
    PeriodicFamily, SawtoothFamily, TrivialFamily,
};

/// What a family needs besides its own parameters.
#[derive(Clone, Copy)]
pub struct FamilyContext<'a> {
    pub grid: TimeGrid,
    pub field_mode: FieldMode,
    pub alpha: f64,
    /// Directory that relative file parameters resolve against.
    pub base_dir: &'a std::path::Path,
    pub registry: &'a FamilyRegistry,
}

#[derive(Debug, Clone)]
pub struct BuiltKernel {
    pub kernel: KernelGrid,
    /// Per-atom component labels known from the construction.
    pub truth: Option<Vec<ComponentLabel>>,
    /// Generating permutation flow, for families that have one.
    pub flow: Option<PermutationFlow>,
}

impl BuiltKernel {
    pub fn new(kernel: KernelGrid) -> Self {
        Self { kernel, truth: None, flow: None }
    }

    pub fn labelled(kernel: KernelGrid, label: ComponentLabel) -> Self {
        let truth = Some(vec![label; kernel.atom_count()]);
        Self { kernel, truth, flow: None }
    }
}

pub trait KernelFamily: Send + Sync {
    fn name(&self) -> &'static str;

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel>;
}

pub struct FamilyRegistry {
    families: BTreeMap<&'static str, Box<dyn KernelFamily>>,
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self { families: BTreeMap::new() }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(HarmonizableFamily));
        r.register(Box::new(TrivialFamily));
        r.register(Box::new(MovingAverageFamily));
        r.register(Box::new(PeriodicFamily));
        r.register(Box::new(CosHarmonizableFamily));
        r.register(Box::new(FlowGeneratedFamily));
        r.register(Box::new(GridCsvFamily));
        r.register(Box::new(SawtoothFamily));
        r.register(Box::new(ErgodicRandomFamily));
        r.register(Box::new(ConcatFamily));
        r
    }

    /// Replaces any family registered under the same name.
    pub fn register(&mut self, family: Box<dyn KernelFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn get(&self, name: &str) -> Option<&dyn KernelFamily> {
        self.families.get(name).map(|f| f.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.families.keys().copied().collect()
    }

    pub fn build(&self, name: &str, params: &Value, grid: TimeGrid, field_mode: FieldMode, alpha: f64, base_dir: impl Into<PathBuf>) -> Result<BuiltKernel> {
        let base_dir = base_dir.into();
        let ctx = FamilyContext { grid, field_mode, alpha, base_dir: &base_dir, registry: self };
        self.build_in(name, params, &ctx)
    }

    pub fn build_in(&self, name: &str, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let family = self.get(name).ok_or_else(|| Error::UnknownFamily(name.to_string()))?;
        family.build(params, ctx)
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Deserializes family parameters, reporting the failing field under the family name.
pub fn parse_params<T: DeserializeOwned>(family: &str, params: &Value) -> Result<T> {
    let params = if params.is_null() { Value::Object(Default::default()) } else { params.clone() };
    serde_json::from_value(params).map_err(|e| Error::FamilyParams { family: family.to_string(), message: e.to_string() })
}

pub(crate) fn param_error(family: &str, message: impl Into<String>) -> Error {
    Error::FamilyParams { family: family.to_string(), message: message.into() }
}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ScalarParam {
    Real(f64),
    Pair([f64; 2]),
}

impl ScalarParam {
    pub fn value(self) -> Complex64 {
        match self {
            ScalarParam::Real(x) => Complex64::new(x, 0.0),
            ScalarParam::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A sign `1`/`-1` or a rational number of turns `[numer, denom]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum PhaseParam {
    Sign(i64),
    Turns([i64; 2]),
}

impl PhaseParam {
    pub fn phase(self, family: &str) -> Result<Phase> {
        match self {
            PhaseParam::Sign(1) => Ok(Phase::ONE),
            PhaseParam::Sign(-1) => Ok(Phase::MINUS_ONE),
            PhaseParam::Sign(s) => Err(param_error(family, format!("phase sign must be 1 or -1, got {s}"))),
            PhaseParam::Turns([_, 0]) => Err(param_error(family, "phase denominator is zero")),
            PhaseParam::Turns([n, d]) => Ok(Phase::turns(n, d)),
        }
    }
}
