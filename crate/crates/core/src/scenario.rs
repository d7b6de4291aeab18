//! Config-driven runs with CSV and JSON output.

use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{
    preset_bc, scenario_bc, BoundaryData, BoundarySpec, FlowScenario, PresetContext, ReferenceState, RegimeCondition,
};
use crate::config::{DataConfig, ExplicitCondition, FaceConfig, InitialKind, RunConfig};
use crate::diagnostics::{bound_check, BoundMode, EnergyReport};
use crate::equations::{EquationSpec, System, Variant};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sbp::{build_operator_set, FaceId, Grid};
use crate::solver::{run, SemiDiscreteSystem, StateField, TimeStepping};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_BOUND: i32 = 2;
pub const EXIT_ABORT: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// A configured system with its initial state.
pub struct Setup {
    pub system: SemiDiscreteSystem<f64>,
    pub initial: StateField<f64>,
    pub stepping: TimeStepping<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSummary {
    pub mode: &'static str,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    pub step: Option<usize>,
    pub min_face_margin: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub system: String,
    pub order: u32,
    pub nodes: Vec<usize>,
    pub seed: u64,
    pub t_end: f64,
    pub time_reached: f64,
    pub steps: usize,
    pub samples: usize,
    pub homogeneous: bool,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub max_identity_residual: f64,
    pub bound: BoundSummary,
    pub abort: Option<String>,
    pub verdict: &'static str,
    pub exit_code: i32,
    pub csv: PathBuf,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: Option<Summary>,
    pub csv_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
    pub report: Option<EnergyReport<f64>>,
    /// Set for configuration and I/O failures.
    pub error: Option<Error>,
}

impl Outcome {
    fn failed(exit_code: i32, error: Error) -> Self {
        Self {
            exit_code,
            summary: None,
            csv_path: None,
            json_path: None,
            report: None,
            error: Some(error),
        }
    }
}

fn config_error(path: &str, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::Config {
            path: path.into(),
            message: other.to_string(),
        },
    }
}

fn equation(config: &RunConfig, system: System) -> EquationSpec<f64> {
    let p = &config.parameters;
    let mut spec = EquationSpec::for_system(system);
    spec.gamma = p.gamma;
    spec.epsilon = p.epsilon;
    spec.coriolis = p.coriolis;
    spec.alpha = p.alpha;
    spec.beta = p.beta;
    spec.kappa = p.kappa;
    spec.degeneracy_threshold = p.degeneracy_threshold;
    spec
}

/// Noise-free initial data in primitive variables.
fn primitive_field(config: &RunConfig, system: System) -> impl Fn([f64; 2]) -> Vec<f64> + Send + Sync + 'static {
    let init = config.initial.clone();
    let base = init.base_state(system);
    let (iu, iv) = system.velocity_components();
    move |[x, y]| {
        let mut prim = base.clone();
        let (dx, dy) = (x - init.center[0], y - init.center[1]);
        match init.kind {
            InitialKind::Uniform => {}
            InitialKind::Source => {
                prim[iu] += init.strength * dx;
                prim[iv] += init.strength * dy;
            }
            InitialKind::Pulse => {
                let bump = init.amplitude * (-(dx * dx + dy * dy) / (init.width * init.width)).exp();
                for v in prim.iter_mut() {
                    *v += bump;
                }
            }
        }
        prim
    }
}

fn matrix(rows: &Option<Vec<Vec<f64>>>, m: usize, n: usize, identity: bool) -> Matrix<f64> {
    match rows {
        Some(r) if m > 0 => Matrix::from_rows(r.clone()),
        _ if identity => Matrix::identity(m),
        _ => Matrix::zeros(m, n),
    }
}

fn explicit(c: &ExplicitCondition, system: System, data: BoundaryData<f64>) -> Result<RegimeCondition<f64>> {
    let variant = c
        .variant_id()
        .ok_or_else(|| Error::InvalidParameter(format!("unknown variant {}", c.variant)))?;
    let (mm, mp) = (c.m_minus, c.m_plus(system));
    RegimeCondition::new(variant, matrix(&c.r, mm, mp, false), matrix(&c.s, mm, mm, true), data)
}

fn face_boundary(
    fc: &FaceConfig,
    face: FaceId,
    spec: &EquationSpec<f64>,
    reference: &Arc<dyn Fn([f64; 2], f64) -> ReferenceState<f64> + Send + Sync>,
) -> Result<BoundarySpec<f64>> {
    let mut ctx = PresetContext::new(spec.clone(), face, fc.mode.into());
    let data = match &fc.data {
        DataConfig::Named(n) if n == "reference" => {
            ctx = ctx.with_reference(reference.clone());
            BoundaryData::Reference(reference.clone())
        }
        DataConfig::Named(_) => BoundaryData::Zero,
        DataConfig::Constant(g) => BoundaryData::Constant(g.clone()),
    };
    let mut bc = if let Some(name) = &fc.preset {
        preset_bc(name, &ctx)?
    } else if let Some(names) = &fc.presets {
        let mut merged = BoundarySpec::new(face, fc.mode.into());
        for name in names {
            let one = preset_bc(name, &ctx)?;
            merged.inflow = merged.inflow.or(one.inflow);
            merged.outflow = merged.outflow.or(one.outflow);
        }
        merged
    } else if let Some(k) = fc.scenario {
        let scenario = FlowScenario::from_index(k).ok_or_else(|| Error::InvalidParameter(format!("scenario {k}")))?;
        scenario_bc(scenario, &ctx)?
    } else {
        let mut bc = BoundarySpec::new(face, fc.mode.into());
        if let Some(c) = &fc.inflow {
            bc.inflow = Some(explicit(c, spec.system, data.clone())?);
        }
        if let Some(c) = &fc.outflow {
            bc.outflow = Some(explicit(c, spec.system, data.clone())?);
        }
        bc
    };
    if let BoundaryData::Constant(_) = data {
        for c in [&mut bc.inflow, &mut bc.outflow].into_iter().flatten() {
            c.data = data.clone();
        }
    }
    Ok(bc)
}

/// Builds the system and initial state of a validated configuration.
/// Failures are reported as configuration errors naming the field.
pub fn build(config: &RunConfig) -> Result<Setup> {
    config.validate()?;
    let system = config.system_id()?;
    let spec = equation(config, system);
    spec.validate().map_err(|e| config_error("parameters", e))?;
    let g = &config.grid;
    let grid = if g.nodes.len() == 1 {
        Grid::line(g.nodes[0], g.x[0], g.x[1])
    } else {
        Grid::rectangle(g.nodes[0], g.nodes[1], (g.x[0], g.x[1]), (g.y[0], g.y[1]))
    }
    .map_err(|e| config_error("grid", e))?;
    let ops = build_operator_set(grid, config.order).map_err(|e| config_error("order", e))?;

    let prim = Arc::new(primitive_field(config, system));
    let (spec_ref, prim_ref) = (spec.clone(), prim.clone());
    let reference: Arc<dyn Fn([f64; 2], f64) -> ReferenceState<f64> + Send + Sync> = Arc::new(move |x, _| {
        ReferenceState {
            u: spec_ref.from_primitive(&prim_ref(x)).unwrap_or_else(|_| prim_ref(x)),
            gradients: None,
        }
    });

    let mut boundaries = Vec::new();
    for &face in config.faces() {
        let path = format!("boundary.{face}");
        let fc = config.boundary.get(face).ok_or_else(|| Error::Config {
            path: path.clone(),
            message: "missing boundary condition".into(),
        })?;
        boundaries.push(face_boundary(fc, face, &spec, &reference).map_err(|e| config_error(&path, e))?);
    }
    let system_def = SemiDiscreteSystem::new(spec.clone(), ops, boundaries).map_err(|e| config_error("boundary", e))?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = config.initial.noise;
    let mut bad = None;
    let initial = system_def.initial_field(|x| {
        let mut p = prim(x);
        if noise > 0.0 {
            for v in p.iter_mut() {
                *v += rng.gen_range(-noise..=noise);
            }
        }
        match spec.from_primitive(&p) {
            Ok(u) => u,
            Err(e) => {
                bad.get_or_insert(e);
                p
            }
        }
    });
    if let Some(e) = bad {
        return Err(config_error("initial", e));
    }
    let stepping = match (config.time.cfl, config.time.dt) {
        (Some(c), _) => TimeStepping::Cfl(c),
        (None, Some(d)) => TimeStepping::Fixed(d),
        (None, None) => unreachable!("validated"),
    };
    Ok(Setup {
        system: system_def,
        initial,
        stepping,
    })
}

/// Runs a configuration and writes `<dir>/<name>.csv` and `<dir>/<name>.json`.
///
/// Exit codes: 0 pass, 1 configuration error, 2 bound violation,
/// 3 numerical abort, 4 I/O failure.
pub fn run_scenario(config: &RunConfig) -> Outcome {
    let setup = match build(config) {
        Ok(s) => s,
        Err(e) => return Outcome::failed(EXIT_CONFIG, e),
    };
    let out = match run(
        &setup.system,
        &setup.initial,
        config.time.t_end,
        setup.stepping,
        config.time.cadence,
    ) {
        Ok(o) => o,
        // invalid run parameters or a state the boundary cannot handle at t = 0
        Err(e @ (Error::InvalidParameter(_) | Error::RegimeChange { .. } | Error::SplitMismatch { .. })) => {
            return Outcome::failed(EXIT_CONFIG, config_error("boundary", e))
        }
        Err(e) => {
            return write_outputs(config, None, Some(e));
        }
    };
    let report = out.report.clone();
    let mut outcome = write_outputs(config, Some((&report, out.time, out.steps)), out.abort);
    outcome.report = Some(report);
    outcome
}

fn write_outputs(config: &RunConfig, result: Option<(&EnergyReport<f64>, f64, usize)>, abort: Option<Error>) -> Outcome {
    let dir = &config.output.dir;
    let csv_path = dir.join(format!("{}.csv", config.output.name));
    let json_path = dir.join(format!("{}.json", config.output.name));

    let empty;
    let (report, time, steps) = match result {
        Some(r) => r,
        None => {
            empty = EnergyReport {
                faces: config.faces().to_vec(),
                samples: Vec::new(),
                steps: Vec::new(),
                initial_energy: 0.0,
                homogeneous: false,
            };
            (&empty, 0.0, 0)
        }
    };
    let mode = if report.homogeneous {
        BoundMode::Homogeneous
    } else {
        BoundMode::Inhomogeneous
    };
    let verdict = bound_check(report, mode);
    // a violation on the steps taken before an abort is still reported as such
    let (exit_code, label) = if !verdict.passed {
        (EXIT_BOUND, "bound-violation")
    } else if abort.is_some() {
        (EXIT_ABORT, "numerical-abort")
    } else {
        (EXIT_PASS, "pass")
    };
    let summary = Summary {
        system: config.system.clone(),
        order: config.order,
        nodes: config.grid.nodes.clone(),
        seed: config.seed,
        t_end: config.time.t_end,
        time_reached: time,
        steps,
        samples: report.samples.len(),
        homogeneous: report.homogeneous,
        initial_energy: report.initial_energy,
        final_energy: report.final_energy(),
        max_identity_residual: report.max_identity_residual(),
        bound: BoundSummary {
            mode: match mode {
                BoundMode::Homogeneous => "homogeneous",
                BoundMode::Inhomogeneous => "inhomogeneous",
            },
            passed: verdict.passed,
            max_violation: verdict.max_violation,
            tolerance: verdict.tolerance,
            step: verdict.step,
            min_face_margin: verdict.min_face_margin,
            detail: verdict.detail,
        },
        abort: abort.map(|e| e.to_string()),
        verdict: label,
        exit_code,
        csv: csv_path.clone(),
    };

    let written = (|| -> Result<()> {
        fs::create_dir_all(dir)?;
        report.write_csv(BufWriter::new(fs::File::create(&csv_path)?))?;
        let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
        fs::write(&json_path, json + "\n")?;
        Ok(())
    })();
    if let Err(e) = written {
        let mut o = Outcome::failed(EXIT_IO, e);
        o.summary = Some(summary);
        return o;
    }
    Outcome {
        exit_code,
        summary: Some(summary),
        csv_path: Some(csv_path),
        json_path: Some(json_path),
        report: None,
        error: None,
    }
}

/// Reads, parses and runs a configuration file.
pub fn run_file(path: &std::path::Path, adjust: impl FnOnce(&mut RunConfig)) -> Outcome {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::failed(EXIT_IO, e.into()),
    };
    let mut config = match crate::config::parse_config(&text) {
        Ok(c) => c,
        Err(e) => return Outcome::failed(EXIT_CONFIG, e),
    };
    adjust(&mut config);
    run_scenario(&config)
}

/// Variant names accepted in explicit conditions.
pub fn variant_names() -> Vec<&'static str> {
    [
        Variant::IeeChar,
        Variant::IeeSqrtPressure,
        Variant::SwePrimitive,
        Variant::SweChar,
        Variant::CeeChar,
        Variant::CeeContracted,
        Variant::InseExtended,
    ]
    .map(Variant::name)
    .to_vec()
}
