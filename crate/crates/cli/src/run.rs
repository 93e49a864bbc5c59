//! Subcommands, exit codes and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};

use logfan_core::degeneration::{build_model, cone_charts, cone_over_slice, delaunay_decomposition, ModelOptions};
use logfan_core::polyhedra::{check_decomposition, ConeDecomposition, DecompositionOptions, DEFAULT_MAX_ORBITS};
use logfan_core::Error as CoreError;
use sha2::{Digest, Sha256};

use crate::config::{parse_config, ConfigError, ValidatedJob};
use crate::report::{
    chart_view, decomposition_view, delaunay_view, model_view, new_report, normal_form, to_dot, ModelView, Provenance, Report,
};

pub const MAX_ORBITS_VAR: &str = "LOGFAN_MAX_ORBITS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DELAUNAY: i32 = 3;
pub const EXIT_DECOMPOSITION: i32 = 4;
pub const EXIT_POLARIZATION: i32 = 5;
pub const EXIT_ADMISSIBILITY: i32 = 6;
pub const EXIT_KATO: i32 = 7;
pub const EXIT_IO: i32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    CheckKato,
    Delaunay,
    BuildModel,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckKato => "check-kato",
            Command::Delaunay => "delaunay",
            Command::BuildModel => "build-model",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub dot: bool,
    pub jobs: Option<usize>,
    pub seed: u64,
    pub max_orbits: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Core(#[from] CoreError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(ConfigError::Io { .. }) | RunError::Io(_) => EXIT_IO,
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Core(CoreError::Internal(_)) => EXIT_INTERNAL,
            RunError::Core(_) => EXIT_CONFIG,
        }
    }
}

/// Exit status of a finished report: 0 iff verified, otherwise the code of the failing stage.
pub fn exit_code(report: &Report) -> i32 {
    if report.is_verified() {
        return EXIT_OK;
    }
    match report.failed_at.as_deref() {
        Some("delaunay") => EXIT_DELAUNAY,
        Some("decomposition") => EXIT_DECOMPOSITION,
        Some("polarization") => EXIT_POLARIZATION,
        Some("admissibility") => EXIT_ADMISSIBILITY,
        Some("kato") => EXIT_KATO,
        _ => EXIT_INTERNAL,
    }
}

/// Orbit bound from the environment, defaulting to 10^5.
pub fn max_orbits_from_env() -> Result<usize, ConfigError> {
    match std::env::var(MAX_ORBITS_VAR) {
        Ok(v) => v.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
            ConfigError::Invalid(vec![crate::config::SchemaError {
                path: MAX_ORBITS_VAR.into(),
                message: format!("expected a positive integer, found {v:?}"),
            }])
        }),
        Err(_) => Ok(DEFAULT_MAX_ORBITS),
    }
}

fn provenance(bytes: &[u8], seed: u64) -> Provenance {
    Provenance { input_sha256: format!("{:x}", Sha256::digest(bytes)), version: env!("CARGO_PKG_VERSION").to_string(), seed }
}

type Outcome = (ModelView, Option<(String, String)>);

fn fail(view: ModelView, stage: &str, message: impl Into<String>) -> Outcome {
    (view, Some((stage.to_string(), message.into())))
}

fn decomposition_of(job: &ValidatedJob, view: &mut ModelView) -> Result<Result<ConeDecomposition, Outcome>, RunError> {
    let r = job.data.rank;
    match &job.cones {
        Some(cones) => match ConeDecomposition::from_ray_lists(r, job.period.clone(), cones) {
            Ok(s) => Ok(Ok(s)),
            Err(e @ CoreError::Internal(_)) => Err(e.into()),
            Err(e) => Ok(Err(fail(view.clone(), "decomposition", e.to_string()))),
        },
        None => match delaunay_decomposition(&job.data) {
            Ok(cells) => {
                view.delaunay = Some(delaunay_view(&cells));
                Ok(Ok(cone_over_slice(&cells)?))
            }
            Err(e @ (CoreError::FormNotInvariant | CoreError::LinearityMismatch(_))) => {
                Ok(Err(fail(view.clone(), "delaunay", e.to_string())))
            }
            Err(e) => Err(e.into()),
        },
    }
}

fn checked_decomposition(job: &ValidatedJob, view: &mut ModelView) -> Result<Result<ConeDecomposition, Outcome>, RunError> {
    let sigma = match decomposition_of(job, view)? {
        Ok(s) => s,
        Err(outcome) => return Ok(Err(outcome)),
    };
    let report = check_decomposition(&sigma, &DecompositionOptions { grid_density: job.options.grid_density });
    view.decomposition = Some(decomposition_view(&sigma, &report));
    if !report.valid {
        let message = report.violations.first().map(|v| v.message.clone()).unwrap_or_default();
        return Ok(Err(fail(view.clone(), "decomposition", message)));
    }
    Ok(Ok(sigma))
}

fn check_kato(job: &ValidatedJob, options: &ModelOptions) -> Result<Outcome, RunError> {
    let mut view = ModelView { rank: job.data.rank, normal_form: Some(normal_form(&job.data)), ..ModelView::default() };
    let sigma = match checked_decomposition(job, &mut view)? {
        Ok(s) => s,
        Err(outcome) => return Ok(outcome),
    };
    let charts = cone_charts(sigma.cones(), &job.data.ground, options)?;
    let bad = charts.iter().find(|c| !c.kato.verdict.is_log_smooth()).map(|c| format!("cone {:?}: {:?}", c.rays, c.kato.verdict));
    view.charts = charts.iter().map(chart_view).collect();
    Ok(match bad {
        Some(message) => fail(view, "kato", message),
        None => (view, None),
    })
}

fn delaunay(job: &ValidatedJob) -> Result<Outcome, RunError> {
    let mut view = ModelView { rank: job.data.rank, normal_form: Some(normal_form(&job.data)), ..ModelView::default() };
    let mut job = job.clone();
    job.cones = None;
    Ok(match checked_decomposition(&job, &mut view)? {
        Ok(_) => (view, None),
        Err(outcome) => outcome,
    })
}

fn model(job: &ValidatedJob, options: &ModelOptions) -> Result<Outcome, RunError> {
    let m = build_model(&job.data, options)?;
    let view = model_view(&job.data, &m);
    Ok((view, m.failure.map(|f| (f.stage.name().to_string(), f.message))))
}

/// Runs a subcommand on a validated job.
pub fn execute(command: Command, job: &ValidatedJob, input: &[u8], seed: u64, max_orbits: usize) -> Result<Report, RunError> {
    let options = ModelOptions { max_orbits, ..job.options };
    let (view, failure) = match command {
        Command::CheckKato => check_kato(job, &options)?,
        Command::Delaunay => delaunay(job)?,
        Command::BuildModel => model(job, &options)?,
        Command::Report => return Err(RunError::Io("the report command reads a stored report".into())),
    };
    Ok(new_report(command.name(), view, failure, provenance(input, seed)))
}

pub fn read_report(path: &Path) -> Result<Report, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Io(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        RunError::Config(ConfigError::Invalid(vec![crate::config::SchemaError { path, message: e.into_inner().to_string() }]))
    })
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `report.json` (and `dual_complex.dot`) into `out`, or prints to stdout without `out`.
pub fn emit_report(report: &Report, out: Option<&Path>, dot: bool) -> Result<(), RunError> {
    let io = |p: &Path, e: std::io::Error| RunError::Io(format!("cannot write {}: {e}", p.display()));
    let graph = report.model.dual_complex.as_ref().map(to_dot);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
            let path = dir.join("report.json");
            fs::write(&path, report_json(report)).map_err(|e| io(&path, e))?;
            if dot {
                let path = dir.join("dual_complex.dot");
                match &graph {
                    Some(g) => fs::write(&path, g).map_err(|e| io(&path, e))?,
                    None => eprintln!("logfan: no dual complex in this report, {} not written", path.display()),
                }
            }
        }
        None => match (&graph, dot) {
            (Some(g), true) => print!("{g}"),
            (None, true) => eprintln!("logfan: no dual complex in this report"),
            _ => print!("{}", report_json(report)),
        },
    }
    Ok(())
}

fn run_inner(opts: &RunOptions) -> Result<Report, RunError> {
    if opts.command == Command::Report {
        return read_report(&opts.config);
    }
    let (job, bytes) = parse_config(&opts.config)?;
    let jobs = opts.jobs.or(job.jobs);
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| RunError::Io(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| execute(opts.command, &job, &bytes, opts.seed, opts.max_orbits))
        }
        None => execute(opts.command, &job, &bytes, opts.seed, opts.max_orbits),
    }
}

/// Runs the command, writes its artifacts and returns the process exit code.
pub fn run(opts: &RunOptions) -> i32 {
    let report = match run_inner(opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("logfan: {e}");
            return e.exit_code();
        }
    };
    if let Err(e) = emit_report(&report, opts.out.as_deref(), opts.dot) {
        eprintln!("logfan: {e}");
        return e.exit_code();
    }
    if let (Some(stage), Some(message)) = (&report.failed_at, &report.failure) {
        eprintln!("logfan: failed at {stage}: {message}");
    }
    for w in &report.warnings {
        eprintln!("logfan: warning: {w}");
    }
    exit_code(&report)
}
