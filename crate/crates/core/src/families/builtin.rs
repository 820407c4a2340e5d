use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;
use serde_json::Value;

use super::{param_error, parse_params, BuiltKernel, FamilyContext, KernelFamily, PhaseParam, ScalarParam};
use crate::decompose::ComponentLabel;
use crate::error::{Error, Result};
use crate::flows::{classify_points, PermutationFlow, Phase, PointLabel, StepCocycle};
use crate::kernels::{
    build_harmonizable_kernel, build_moving_average_kernel, build_periodic_kernel, build_trivial_kernel, flow_generated_kernel, harmonizable_as_cyclic, HarmonizableSpec,
    KernelGrid, MovingAverageTaps, PeriodicKernelSpec,
};
use crate::measure_space::{FiberLayout, TimeMode, WeightedAtomSpace};
use crate::mode::FieldMode;

fn scalars(v: &[ScalarParam]) -> Vec<Complex64> {
    v.iter().map(|s| s.value()).collect()
}

fn require_real(family: &str, ctx: &FamilyContext<'_>) -> Result<()> {
    if ctx.field_mode != FieldMode::Real {
        return Err(param_error(family, format!("needs field_mode real, got {:?}", ctx.field_mode)));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HarmonizableParams {
    frequencies: Vec<f64>,
    masses: Vec<f64>,
    /// Builds the equivalent cyclic representation on `[0, 2)` fibers instead.
    #[serde(default)]
    cyclic_cells: Option<usize>,
    #[serde(default = "default_fiber_mode")]
    cyclic_fiber_mode: TimeMode,
}

/// `f_t(x) = e^{itx}` against a finite spectral measure of point masses.
pub struct HarmonizableFamily;

impl KernelFamily for HarmonizableFamily {
    fn name(&self) -> &'static str {
        "harmonizable"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let p: HarmonizableParams = parse_params(self.name(), params)?;
        let spec = HarmonizableSpec::new(p.frequencies, p.masses)?;
        let k = match p.cyclic_cells {
            None => build_harmonizable_kernel(&spec, &ctx.grid, ctx.field_mode)?,
            Some(cells) => build_periodic_kernel(&harmonizable_as_cyclic(&spec, cells, p.cyclic_fiber_mode, ctx.field_mode)?, &ctx.grid)?,
        };
        Ok(BuiltKernel::labelled(k, ComponentLabel::FixedHarmonizable))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrivialParams {
    mass1: f64,
    #[serde(default)]
    mass2: f64,
}

pub struct TrivialFamily;

impl KernelFamily for TrivialFamily {
    fn name(&self) -> &'static str {
        "trivial"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        require_real(self.name(), ctx)?;
        let p: TrivialParams = parse_params(self.name(), params)?;
        let k = build_trivial_kernel(&ctx.grid, p.mass1, p.mass2)?;
        Ok(BuiltKernel::labelled(k, ComponentLabel::FixedHarmonizable))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Geometric {
    rho: f64,
    len: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MovingAverageParams {
    #[serde(default)]
    weights: Option<Vec<f64>>,
    #[serde(default)]
    u_min: i64,
    #[serde(default)]
    taps: Option<Vec<Vec<ScalarParam>>>,
    #[serde(default)]
    geometric: Option<Geometric>,
}

pub struct MovingAverageFamily;

impl KernelFamily for MovingAverageFamily {
    fn name(&self) -> &'static str {
        "moving_average"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let p: MovingAverageParams = parse_params(self.name(), params)?;
        let taps = match (p.taps, p.geometric) {
            (Some(t), None) => MovingAverageTaps { u_min: p.u_min, taps: t.iter().map(|k| scalars(k)).collect() },
            (None, Some(g)) => {
                if !(g.rho.abs() < 1.0) || g.len == 0 {
                    return Err(param_error(self.name(), "geometric needs |rho| < 1 and len > 0"));
                }
                let mut t = MovingAverageTaps::geometric(g.rho, g.len);
                t.u_min = p.u_min;
                t
            }
            _ => return Err(param_error(self.name(), "exactly one of `taps` and `geometric` is required")),
        };
        let weights = p.weights.unwrap_or_else(|| vec![1.0; taps.taps.len()]);
        let base = WeightedAtomSpace::indexed(weights, "x")?;
        let k = build_moving_average_kernel(&taps, &base, &ctx.grid, ctx.field_mode)?;
        Ok(BuiltKernel::labelled(k, ComponentLabel::Dissipative))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Cells {
    One(usize),
    Each(Vec<usize>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Shape {
    shape: String,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GParam {
    Samples(Vec<Vec<ScalarParam>>),
    Shape(Shape),
}

fn default_fiber_mode() -> TimeMode {
    TimeMode::RealGrid
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodicParams {
    weights: Vec<f64>,
    period: Vec<f64>,
    #[serde(default)]
    b1: Option<Vec<ScalarParam>>,
    #[serde(default)]
    speed: Option<Vec<f64>>,
    cells: Cells,
    #[serde(default = "default_fiber_mode")]
    fiber_mode: TimeMode,
    g: GParam,
}

/// `f_t(z, v) = b1(z)^{[v + s t]_q} g(z, {v + s t}_q)` on a sampled fiber.
pub struct PeriodicFamily;

impl KernelFamily for PeriodicFamily {
    fn name(&self) -> &'static str {
        "periodic"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let p: PeriodicParams = parse_params(self.name(), params)?;
        let n = p.weights.len();
        let base = WeightedAtomSpace::indexed(p.weights, "z")?;
        let b1 = p.b1.map(|b| scalars(&b)).unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); n]);
        let speed = p.speed.unwrap_or_else(|| vec![1.0; n]);
        let cells = match p.cells {
            Cells::One(c) => vec![c; n],
            Cells::Each(c) => c,
        };
        let layout = FiberLayout::new(base.clone(), p.period.clone(), cells, p.fiber_mode)?;
        let g: Vec<Vec<Complex64>> = match p.g {
            GParam::Samples(s) => s.iter().map(|row| scalars(row)).collect(),
            GParam::Shape(shape) => {
                let mut rng = ChaCha8Rng::seed_from_u64(shape.seed);
                let complex = ctx.field_mode.complex_values();
                (0..n)
                    .map(|z| {
                        (0..layout.cells(z))
                            .map(|j| {
                                let u = layout.position(z, j);
                                match shape.shape.as_str() {
                                    "sawtooth" => Ok(Complex64::new(u, 0.0)),
                                    "cos" => Ok(Complex64::new(u.cos(), 0.0)),
                                    "random" => Ok(random_value(&mut rng, complex)),
                                    other => Err(param_error("periodic", format!("unknown g shape `{other}`"))),
                                }
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?
            }
        };
        let spec = PeriodicKernelSpec::new(base, p.period, b1, speed, g, p.fiber_mode, ctx.field_mode)?;
        Ok(BuiltKernel::new(build_periodic_kernel(&spec, &ctx.grid)?))
    }
}

/// Modulus in `[0.5, 1.5)`, random sign or phase.
fn random_value(rng: &mut ChaCha8Rng, complex: bool) -> Complex64 {
    let r = rng.random_range(0.5..1.5);
    if complex {
        Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
    } else if rng.random::<bool>() {
        Complex64::new(r, 0.0)
    } else {
        Complex64::new(-r, 0.0)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CosParams {
    masses: Vec<f64>,
    #[serde(default)]
    frequencies: Option<Vec<f64>>,
    /// Fiber cells moved per grid step; sets `z = 2 pi m / (cells * step)`.
    #[serde(default)]
    shifts: Option<Vec<i64>>,
    #[serde(default = "default_cos_cells")]
    cells: usize,
}

fn default_cos_cells() -> usize {
    512
}

/// `f_t(z, v) = cos(z t + v)` on `[0, 2 pi)` fibers, the cyclic form of a real-part harmonizable.
pub struct CosHarmonizableFamily;

impl KernelFamily for CosHarmonizableFamily {
    fn name(&self) -> &'static str {
        "cos_harmonizable"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        require_real(self.name(), ctx)?;
        let p: CosParams = parse_params(self.name(), params)?;
        let tau = std::f64::consts::TAU;
        let z = match (p.frequencies, p.shifts) {
            (Some(f), None) => f,
            (None, Some(m)) => m.iter().map(|&m| tau * m as f64 / (p.cells as f64 * ctx.grid.step)).collect(),
            _ => return Err(param_error(self.name(), "exactly one of `frequencies` and `shifts` is required")),
        };
        let n = z.len();
        if p.masses.len() != n {
            return Err(param_error(self.name(), format!("{} masses for {n} frequencies", p.masses.len())));
        }
        let base = WeightedAtomSpace::indexed(p.masses, "z")?;
        let spec = PeriodicKernelSpec::sampled(
            base,
            vec![tau; n],
            vec![Complex64::new(1.0, 0.0); n],
            z,
            vec![p.cells; n],
            TimeMode::RealGrid,
            FieldMode::Real,
            |_, u| Complex64::new(u.cos(), 0.0),
        )?;
        Ok(BuiltKernel::labelled(build_periodic_kernel(&spec, &ctx.grid)?, ComponentLabel::Cyclic))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowParams {
    map: Vec<usize>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
    f0: Vec<ScalarParam>,
    #[serde(default)]
    step: Option<Vec<PhaseParam>>,
}

/// `f_n(s) = a_n(s) f0(phi^n s)` for a permutation `phi` and a cocycle built from one-step phases.
pub struct FlowGeneratedFamily;

impl KernelFamily for FlowGeneratedFamily {
    fn name(&self) -> &'static str {
        "flow_generated"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let p: FlowParams = parse_params(self.name(), params)?;
        let n = p.map.len();
        let space = WeightedAtomSpace::indexed(p.weights.unwrap_or_else(|| vec![1.0; n]), "s")?;
        let flow = PermutationFlow::new(space, p.map)?;
        let step = match p.step {
            Some(s) => s.into_iter().map(|x| x.phase(self.name())).collect::<Result<Vec<_>>>()?,
            None => vec![Phase::ONE; n],
        };
        if step.len() != n {
            return Err(param_error(self.name(), format!("{} step phases for {n} atoms", step.len())));
        }
        let cocycle = StepCocycle { flow: flow.clone(), step };
        let kernel = flow_generated_kernel(&scalars(&p.f0), &flow, &cocycle, &ctx.grid, ctx.field_mode, ctx.alpha)?;
        let truth = classify_points(&flow, n)
            .labels
            .iter()
            .map(|l| match l {
                PointLabel::Fixed => ComponentLabel::FixedHarmonizable,
                PointLabel::Cyclic => ComponentLabel::Cyclic,
                PointLabel::Nonperiodic => ComponentLabel::ConservativeNonperiodic,
            })
            .collect();
        Ok(BuiltKernel { kernel, truth: Some(truth), flow: Some(flow) })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CsvParams {
    path: String,
    #[serde(default)]
    labels: Option<Vec<ComponentLabel>>,
}

/// Raw kernel matrix: a weights row, then one row per grid time (earliest first).
/// Entries parse as real or complex numbers such as `0.5`, `1-2i`.
pub struct GridCsvFamily;

impl KernelFamily for GridCsvFamily {
    fn name(&self) -> &'static str {
        "grid_csv"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let p: CsvParams = parse_params(self.name(), params)?;
        let path = ctx.base_dir.join(&p.path);
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(&path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let row = rec
                .iter()
                .map(|f| Complex64::from_str(f).map_err(|_| param_error(self.name(), format!("row {}: cannot parse `{f}`", i + 1))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let Some((weights, values)) = rows.split_first() else {
            return Err(param_error(self.name(), "file is empty"));
        };
        if weights.iter().any(|w| w.im != 0.0) {
            return Err(param_error(self.name(), "weights must be real"));
        }
        let n = weights.len();
        if values.len() != ctx.grid.len() {
            return Err(param_error(self.name(), format!("{} time rows for a grid of {} times", values.len(), ctx.grid.len())));
        }
        if let Some(i) = values.iter().position(|r| r.len() != n) {
            return Err(param_error(self.name(), format!("time row {} has {} entries, expected {n}", i + 1, values[i].len())));
        }
        if !ctx.field_mode.complex_values() && values.iter().flatten().any(|v| v.im != 0.0) {
            return Err(Error::ModeMismatch("complex entries in a real kernel".into()));
        }
        let space = WeightedAtomSpace::indexed(weights.iter().map(|w| w.re).collect(), "csv")?;
        let matrix = Array2::from_shape_fn((values.len(), n), |(i, s)| values[i][s]);
        let kernel = KernelGrid::new(space, ctx.grid, matrix, ctx.field_mode)?;
        if let Some(labels) = &p.labels {
            if labels.len() != n {
                return Err(param_error(self.name(), format!("{} labels for {n} atoms", labels.len())));
            }
        }
        Ok(BuiltKernel { kernel, truth: p.labels, flow: None })
    }
}

fn default_sawtooth_cells() -> usize {
    64
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SawtoothParams {
    #[serde(default = "default_sawtooth_cells")]
    cells: usize,
}

/// `f_t(v) = {v + t}_1` on `v` in `[0, 1)`.
pub struct SawtoothFamily;

impl KernelFamily for SawtoothFamily {
    fn name(&self) -> &'static str {
        "sawtooth"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let p: SawtoothParams = parse_params(self.name(), params)?;
        let base = WeightedAtomSpace::indexed(vec![1.0], "z")?;
        let one = Complex64::new(1.0, 0.0);
        let spec = PeriodicKernelSpec::sampled(base, vec![1.0], vec![one], vec![1.0], vec![p.cells], TimeMode::RealGrid, ctx.field_mode, |_, u| {
            Complex64::new(u, 0.0)
        })?;
        Ok(BuiltKernel::labelled(build_periodic_kernel(&spec, &ctx.grid)?, ComponentLabel::Cyclic))
    }
}

fn default_rho() -> f64 {
    0.8
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ErgodicParams {
    atoms: usize,
    seed: u64,
    #[serde(default = "default_rho")]
    rho: f64,
}

/// Columns are windows of one bounded autoregressive path wrapped on a cycle longer
/// than the grid, so no shift inside the window relates two times.
pub struct ErgodicRandomFamily;

impl KernelFamily for ErgodicRandomFamily {
    fn name(&self) -> &'static str {
        "ergodic_random"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let p: ErgodicParams = parse_params(self.name(), params)?;
        if p.atoms <= 2 * ctx.grid.half_window {
            return Err(param_error(self.name(), format!("atoms must exceed twice the half window ({})", 2 * ctx.grid.half_window)));
        }
        if !(p.rho.abs() < 1.0) {
            return Err(param_error(self.name(), "rho must satisfy |rho| < 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let innovation = (1.0 - p.rho * p.rho).sqrt();
        let mut x: f64 = rng.sample(StandardNormal);
        let path: Vec<f64> = (0..p.atoms)
            .map(|_| {
                let e: f64 = rng.sample(StandardNormal);
                x = p.rho * x + innovation * e;
                x.tanh()
            })
            .collect();
        let l = p.atoms as i64;
        let space = WeightedAtomSpace::indexed(vec![1.0 / p.atoms as f64; p.atoms], "path")?;
        let grid = ctx.grid;
        let kernel = KernelGrid::from_fn(space, grid, ctx.field_mode, |i, s| {
            Ok(Complex64::new(path[(s as i64 + grid.steps_of_index(i)).rem_euclid(l) as usize], 0.0))
        })?;
        Ok(BuiltKernel::labelled(kernel, ComponentLabel::ConservativeNonperiodic))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Block {
    family: String,
    #[serde(default)]
    params: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConcatParams {
    blocks: Vec<Block>,
}

/// Disjoint union of other families on the same grid.
pub struct ConcatFamily;

impl KernelFamily for ConcatFamily {
    fn name(&self) -> &'static str {
        "concat"
    }

    fn build(&self, params: &Value, ctx: &FamilyContext<'_>) -> Result<BuiltKernel> {
        let p: ConcatParams = parse_params(self.name(), params)?;
        if p.blocks.is_empty() {
            return Err(param_error(self.name(), "blocks is empty"));
        }
        let built = p.blocks.iter().map(|b| ctx.registry.build_in(&b.family, &b.params, ctx)).collect::<Result<Vec<_>>>()?;
        let kernels: Vec<&KernelGrid> = built.iter().map(|b| &b.kernel).collect();
        let names: Vec<&str> = p.blocks.iter().map(|b| b.family.as_str()).collect();
        let kernel = KernelGrid::concat(&kernels, names.join("+"))?;
        let truth = built.iter().map(|b| b.truth.clone()).collect::<Option<Vec<_>>>().map(|t| t.concat());
        Ok(BuiltKernel { kernel, truth, flow: None })
    }
}
