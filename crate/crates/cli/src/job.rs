use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use stableflow::decompose::DetectionConfig;
use stableflow::families::ScalarParam;
use stableflow::measure_space::{Probe, ProbeSet, TimeGrid, TimeMode};
use stableflow::stable::{AlphaSpec, SimulationConfig, TailCorrection};
use stableflow::FieldMode;

use crate::CliError;

/// Seed of the default probe suite when the job names neither probes nor a seed.
pub const DEFAULT_PROBE_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub mode: TimeMode,
    #[serde(default = "one")]
    pub step: f64,
    pub half_window: usize,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub seed: u64,
    pub series_terms: usize,
    pub paths: usize,
    #[serde(default)]
    pub tail: TailCorrection,
    /// Reports `max |X(t + period) - X(t)|` when set.
    #[serde(default)]
    pub period_check: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeInput {
    pub thetas: Vec<ScalarInput>,
    pub times: Vec<f64>,
}

/// Serializable mirror of a real number or `[re, im]` pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarInput {
    Real(f64),
    Pair([f64; 2]),
}

impl ScalarInput {
    fn param(self) -> ScalarParam {
        match self {
            ScalarInput::Real(x) => ScalarParam::Real(x),
            ScalarInput::Pair(p) => ScalarParam::Pair(p),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub family: String,
    #[serde(default)]
    pub params: Value,
    /// Defaults to the job's field mode.
    #[serde(default)]
    pub field_mode: Option<FieldMode>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub against: KernelSection,
    /// Compare the job kernel with `scale_b` times the other one.
    #[serde(default)]
    pub scale_b: Option<f64>,
    /// Alternative to `scale_b`: the scale is `scale_base^{1/alpha}`.
    #[serde(default)]
    pub scale_base: Option<f64>,
    #[serde(default = "default_verify_tol")]
    pub tolerance: f64,
}

fn default_verify_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub family: String,
    #[serde(default)]
    pub params: Value,
    pub alpha: f64,
    pub field_mode: FieldMode,
    pub grid: GridSection,
    #[serde(default)]
    pub probes: Option<Vec<ProbeInput>>,
    #[serde(default)]
    pub probe_seed: Option<u64>,
    #[serde(default)]
    pub sim: Option<SimSection>,
    #[serde(default)]
    pub detection: DetectionConfig,
    #[serde(default)]
    pub verify: Option<VerifySection>,
}

impl Job {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read job {}: {e}", path.display())))?;
        Self::parse(&text, is_json(path)).map_err(|e| CliError::config(format!("job {}: {e}", path.display())))
    }

    pub fn parse(text: &str, json: bool) -> Result<Self, String> {
        let job: Job = if json {
            serde_json::from_str(text).map_err(|e| e.to_string())?
        } else {
            toml::from_str(text).map_err(|e| e.to_string())?
        };
        if job.probes.is_some() && job.probe_seed.is_some() {
            return Err("set either `probes` or `probe_seed`, not both".into());
        }
        Ok(job)
    }

    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        TimeGrid::new(self.grid.mode, self.grid.step, self.grid.half_window).map_err(|e| CliError::config(format!("grid: {e}")))
    }

    pub fn alpha_spec(&self) -> Result<AlphaSpec, CliError> {
        AlphaSpec::new(self.alpha, self.field_mode).map_err(|e| CliError::config(format!("alpha: {e}")))
    }

    pub fn sim_config(&self) -> Result<(SimulationConfig, &SimSection), CliError> {
        let sim = self.sim.as_ref().ok_or_else(|| CliError::config("sim: missing section"))?;
        let cfg = SimulationConfig { seed: sim.seed, series_terms: sim.series_terms, paths: sim.paths, tail: sim.tail };
        cfg.validate().map_err(|e| CliError::config(format!("sim: {e}")))?;
        Ok((cfg, sim))
    }

    /// Probes from `override_path`, the job, or the seeded default suite, in that order.
    pub fn probes(&self, grid: &TimeGrid, mode: FieldMode, override_path: Option<&Path>) -> Result<(ProbeSet, ProbeOrigin), CliError> {
        let (set, origin) = if let Some(path) = override_path {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read probes {}: {e}", path.display())))?;
            let inputs = parse_probe_file(&text, is_json(path)).map_err(|e| CliError::config(format!("probes {}: {e}", path.display())))?;
            (to_probe_set(&inputs), ProbeOrigin::File(path.to_path_buf()))
        } else if let Some(inputs) = &self.probes {
            (to_probe_set(inputs), ProbeOrigin::Job)
        } else {
            let seed = self.probe_seed.unwrap_or(DEFAULT_PROBE_SEED);
            (ProbeSet::default_suite(seed, grid, mode), ProbeOrigin::Seed(seed))
        };
        set.validate(grid, mode).map_err(|e| CliError::config(format!("probes: {e}")))?;
        Ok((set, origin))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeOrigin {
    File(PathBuf),
    Job,
    Seed(u64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeFile {
    probes: Vec<ProbeInput>,
}

fn parse_probe_file(text: &str, json: bool) -> Result<Vec<ProbeInput>, String> {
    let f: ProbeFile = if json {
        serde_json::from_str(text).map_err(|e| e.to_string())?
    } else {
        toml::from_str(text).map_err(|e| e.to_string())?
    };
    Ok(f.probes)
}

fn to_probe_set(inputs: &[ProbeInput]) -> ProbeSet {
    ProbeSet::new(
        inputs
            .iter()
            .map(|p| Probe { thetas: p.thetas.iter().map(|s| s.param().value()).collect(), times: p.times.clone() })
            .collect(),
    )
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}
