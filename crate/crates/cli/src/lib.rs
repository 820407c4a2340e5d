//! Batch commands behind the `stableflow` binary.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use stableflow::decompose::{
    classify_process, decompose_four, AtomClassification, ComponentLabel, DecompositionResult, ProcessVerdict,
};
use stableflow::families::{BuiltKernel, FamilyRegistry};
use stableflow::measure_space::ProbeSet;
use stableflow::stable::{check_equal_in_distribution, lepage_simulate, period_difference};
use stableflow::{Error, FieldMode};

pub mod job;

pub use job::Job;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNDECIDED: i32 = 3;
pub const EXIT_ADDITIVITY: i32 = 4;
pub const EXIT_DEGENERATE: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Undecided { .. } => EXIT_UNDECIDED,
            Error::AdditivityResidual(_) => EXIT_ADDITIVITY,
            Error::DegenerateKernel | Error::SupportViolation(_) | Error::NonFinite | Error::EmptySpace => EXIT_DEGENERATE,
            Error::FixedCrossCheck { .. } | Error::InclusionViolation(_) | Error::Io(_) => EXIT_INTERNAL,
            _ => EXIT_CONFIG,
        };
        Self::new(code, e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Decompose,
    Simulate,
    Verify,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Decompose => "decompose",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub override_undecided: Option<ComponentLabel>,
    pub probes: Option<PathBuf>,
}

/// Runs one command and writes its output file. Returns a one-line summary.
pub fn run(command: Command, job_path: &Path, out: &Path, opts: &Options) -> Result<String, CliError> {
    let job = Job::load(job_path)?;
    let base_dir = job_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let registry = FamilyRegistry::with_builtins();
    let built = build_kernel(&registry, &job, &job.family, &job.params, job.field_mode, &base_dir)?;
    match command {
        Command::Classify => classify(&job, &built, opts, out),
        Command::Decompose => decompose(&job, &built, opts, out),
        Command::Simulate => simulate(&job, &built, out),
        Command::Verify => verify(&job, &built, &registry, &base_dir, opts, out),
    }
}

fn build_kernel(registry: &FamilyRegistry, job: &Job, family: &str, params: &serde_json::Value, mode: FieldMode, base_dir: &Path) -> Result<BuiltKernel, CliError> {
    let grid = job.grid()?;
    job.alpha_spec()?;
    registry.build(family, params, grid, mode, job.alpha, base_dir).map_err(CliError::from)
}

#[derive(Serialize)]
struct Inclusions {
    fixed_in_periodic: bool,
    periodic_in_conservative: bool,
}

fn inclusions(c: &AtomClassification) -> Inclusions {
    Inclusions {
        fixed_in_periodic: c.atoms.iter().all(|a| a.label != ComponentLabel::FixedHarmonizable || a.period.is_some() || a.overridden),
        periodic_in_conservative: c.atoms.iter().all(|a| a.label != ComponentLabel::Dissipative || a.period.is_none()),
    }
}

fn label_counts(c: &AtomClassification) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    for l in ComponentLabel::ALL {
        m.insert(l.as_str().to_string(), json!(c.count(l)));
    }
    serde_json::Value::Object(m)
}

fn truth_mismatches(built: &BuiltKernel, c: &AtomClassification) -> Option<Vec<usize>> {
    built.truth.as_ref().map(|t| t.iter().zip(c.labels()).enumerate().filter(|(_, (a, b))| **a != *b).map(|(i, _)| i).collect())
}

fn classify(job: &Job, built: &BuiltKernel, opts: &Options, out: &Path) -> Result<String, CliError> {
    let alpha = job.alpha_spec()?;
    let (verdict, c) = classify_process(&built.kernel, &alpha, &job.detection, opts.override_undecided)?;
    let report = json!({
        "command": "classify",
        "job": job,
        "override_undecided": opts.override_undecided,
        "atom_count": built.kernel.atom_count(),
        "verdict": verdict,
        "counts": label_counts(&c),
        "undecided": c.undecided,
        "inclusions": inclusions(&c),
        "truth_mismatches": truth_mismatches(built, &c),
        "atoms": c.atoms,
    });
    write_json(out, &report)?;
    Ok(format!("verdict {}", verdict_str(verdict)))
}

fn verdict_str(v: ProcessVerdict) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn decompose(job: &Job, built: &BuiltKernel, opts: &Options, out: &Path) -> Result<String, CliError> {
    let alpha = job.alpha_spec()?;
    let grid = job.grid()?;
    let (probes, origin) = job.probes(&grid, job.field_mode, opts.probes.as_deref())?;
    let r: DecompositionResult = decompose_four(&built.kernel, &alpha, &probes, &job.detection, opts.override_undecided)?;
    let components: Vec<_> = r
        .components
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "empty": c.is_empty(),
                "atoms": c.atoms,
                "sigma": c.sigma,
                "stationarity": c.stationarity,
            })
        })
        .collect();
    let report = json!({
        "command": "decompose",
        "job": job,
        "override_undecided": opts.override_undecided,
        "probe_origin": origin,
        "probes": probes,
        "atom_count": built.kernel.atom_count(),
        "counts": label_counts(&r.classification),
        "undecided": r.classification.undecided,
        "truth_mismatches": truth_mismatches(built, &r.classification),
        "shifts": r.shifts,
        "whole_sigma": r.whole_sigma,
        "additivity_residual": r.additivity_residual,
        "components": components,
    });
    write_json(out, &report)?;
    Ok(format!("{} nonempty components, additivity residual {:e}", r.nonempty(), r.additivity_residual))
}

fn simulate(job: &Job, built: &BuiltKernel, out: &Path) -> Result<String, CliError> {
    let alpha = job.alpha_spec()?;
    let (cfg, sim) = job.sim_config()?;
    let paths = lepage_simulate(&built.kernel, &alpha, &cfg)?;
    let grid = built.kernel.grid();
    let diagnostic = match sim.period_check {
        Some(period) => {
            let steps = grid.lattice_steps(period).map_err(|e| CliError::config(format!("sim.period_check: {e}")))?;
            Some(period_difference(&paths, steps, period))
        }
        None => None,
    };
    let complex = job.field_mode == FieldMode::Complex;
    let mut csv = String::new();
    csv.push_str(&format!(
        "# seed={} alpha={} series_terms={} paths={} field_mode={} tail={}\n",
        cfg.seed,
        job.alpha,
        cfg.series_terms,
        cfg.paths,
        serde_json::to_value(job.field_mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        serde_json::to_value(cfg.tail).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
    ));
    if let Some(d) = &diagnostic {
        csv.push_str(&format!("# period_check period={} compared_pairs={} max_abs_difference={}\n", d.period, d.compared_pairs, d.max_abs_difference));
    }
    csv.push_str(if complex { "path_id,time,re,im\n" } else { "path_id,time,value\n" });
    for (p, row) in paths.rows().into_iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let t = grid.time(i);
            if complex {
                csv.push_str(&format!("{p},{t},{},{}\n", v.re, v.im));
            } else {
                csv.push_str(&format!("{p},{t},{}\n", v.re));
            }
        }
    }
    write_atomic(out, csv.as_bytes())?;
    Ok(match diagnostic {
        Some(d) => format!("{} paths, max |X(t+{}) - X(t)| = {}", cfg.paths, d.period, d.max_abs_difference),
        None => format!("{} paths", cfg.paths),
    })
}

fn verify(job: &Job, built: &BuiltKernel, registry: &FamilyRegistry, base_dir: &Path, opts: &Options, out: &Path) -> Result<String, CliError> {
    let v = job.verify.as_ref().ok_or_else(|| CliError::config("verify: missing section"))?;
    let mode_b = v.against.field_mode.unwrap_or(job.field_mode);
    let other = build_kernel(registry, job, &v.against.family, &v.against.params, mode_b, base_dir)?;
    let scale_b = match (v.scale_b, v.scale_base) {
        (Some(s), None) => s,
        (None, Some(b)) => b.powf(1.0 / job.alpha),
        _ => return Err(CliError::config("verify: set exactly one of `scale_b` and `scale_base`")),
    };
    if mode_b.real_probes() != job.field_mode.real_probes() {
        return Err(CliError::config("verify.against.field_mode: probes must be real for both kernels or complex for both"));
    }
    let grid = job.grid()?;
    let (probes, origin): (ProbeSet, _) = job.probes(&grid, job.field_mode, opts.probes.as_deref())?;
    let r = check_equal_in_distribution(&built.kernel, &other.kernel, scale_b, job.alpha, &probes, v.tolerance)?;
    let report = json!({
        "command": "verify",
        "job": job,
        "probe_origin": origin,
        "probes": probes,
        "scale_b": scale_b,
        "result": r,
    });
    write_json(out, &report)?;
    if r.passed {
        Ok(format!("pass, max deviation {:e}", r.max_normalized_deviation))
    } else {
        Err(CliError::new(EXIT_VERIFY, format!("verification failed: max deviation {:e} above {:e}", r.max_normalized_deviation, v.tolerance)))
    }
}

fn write_json(out: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::new(EXIT_INTERNAL, e.to_string()))?;
    text.push('\n');
    write_atomic(out, text.as_bytes())
}

/// Writes next to the target, then renames over it.
pub fn write_atomic(out: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::new(EXIT_INTERNAL, format!("cannot write {}: {e}", out.display()));
    let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = out.file_name().ok_or_else(|| CliError::config(format!("--out {} has no file name", out.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    std::fs::rename(&tmp, out).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}
