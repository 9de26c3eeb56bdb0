//! The solve, verify, evolve, derive and sweep workflows.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ptnlse_core::report::{to_json, write_evolution_csv, write_field_csv};
use ptnlse_core::verify::verification_fields;
use ptnlse_core::{
    compare_printed, eval_ansatz, solve, split_step, verify_with, EvolutionConfig, Family, Grid1D,
    PotentialSpec, SystemParams, VerifyOptions,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::value::RawValue;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::sweep::{parse_sweep, points, Point, SweepError};

/// Environment variable capping the sweep worker pool.
pub const THREADS_VAR: &str = "PTNLSE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Sweep(#[from] SweepError),

    #[error(transparent)]
    Core(#[from] ptnlse_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Whether a run that completed found what it looked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    Negative,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Positive
        } else {
            Outcome::Negative
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Positive => 0,
            Outcome::Negative => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_owned(),
        source,
    }
}

/// Writes `body` to `path`, or to stdout when `path` is `None`.
fn emit(
    path: Option<&Path>,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err(p))?);
            body(&mut w)?;
            w.flush().map_err(io_err(p))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush().map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn emit_line(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    emit(path, |w| {
        writeln!(w, "{text}").map_err(io_err(Path::new("<output>")))
    })
}

pub fn potential(cfg: &RunConfig) -> Result<PotentialSpec, CliError> {
    let family = cfg.family()?;
    let (a, b) = cfg.depth_and_gain()?;
    if family == Family::PhaseLocked {
        if cfg.alpha != 1.0 {
            return Err(CliError::Usage(
                "--alpha: the phase-locked family fixes alpha = 1".into(),
            ));
        }
        return Ok(PotentialSpec::phase_locked(a, b)?);
    }
    Ok(PotentialSpec::new(family, a, b, cfg.alpha)?)
}

pub fn system(cfg: &RunConfig) -> Result<SystemParams, CliError> {
    Ok(SystemParams::new(cfg.g, cfg.mu)?)
}

fn verify_options(cfg: &RunConfig) -> VerifyOptions {
    VerifyOptions {
        half_width: cfg.half_width,
        n_points: cfg.n_points,
        interval: cfg.interval,
        quadrant: cfg.quadrant,
        ..Default::default()
    }
}

pub fn solve_json(cfg: &RunConfig) -> Result<(String, Outcome), CliError> {
    let report = solve(&potential(cfg)?, &system(cfg)?)?;
    Ok((to_json(&report)?, Outcome::from_bool(report.exists)))
}

pub fn run_solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (json, outcome) = solve_json(cfg)?;
    emit_line(cfg.output.as_deref(), &json)?;
    Ok(outcome)
}

pub fn verify_json(cfg: &RunConfig) -> Result<(String, Outcome), CliError> {
    let report = verify_with(&potential(cfg)?, &system(cfg)?, &verify_options(cfg))?;
    Ok((to_json(&report)?, Outcome::from_bool(report.pass)))
}

pub fn run_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = potential(cfg)?;
    let sys = system(cfg)?;
    let opts = verify_options(cfg);
    let report = verify_with(&spec, &sys, &opts)?;
    if let Some(path) = cfg.csv.as_deref() {
        let solved = solve(&spec, &sys)?;
        if let Some(params) = solved.ansatz(cfg.quadrant) {
            let dump = verification_fields(&spec, &sys, &params, solved.energy, &opts)?;
            emit(Some(path), |w| {
                Ok(write_field_csv(
                    w,
                    &dump.psi,
                    &dump.potential,
                    &dump.residual,
                )?)
            })?;
        }
    }
    emit_line(cfg.output.as_deref(), &to_json(&report)?)?;
    Ok(Outcome::from_bool(report.pass))
}

pub fn run_evolve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = potential(cfg)?;
    if !matches!(spec.family(), Family::Scarf2Hyp | Family::RmHyp) {
        return Err(ptnlse_core::Error::UnsupportedFamily(spec.family()).into());
    }
    let sys = system(cfg)?;
    let evo = EvolutionConfig::new(cfg.dt, cfg.t_final, cfg.stride)?;
    let solved = solve(&spec, &sys)?;
    let Some(params) = solved.ansatz(cfg.quadrant) else {
        eprintln!(
            "no stationary state to evolve: {}",
            solved.discrepancies.join("; ")
        );
        return Ok(Outcome::Negative);
    };
    let half = cfg.half_width.unwrap_or(20.0 / spec.alpha());
    let grid = Grid1D::symmetric(half, cfg.n_points.unwrap_or(2048), true)?;
    let psi = eval_ansatz(&params, &spec, &grid)?;
    let out = cfg.output.as_deref().or(cfg.csv.as_deref());
    match split_step(&psi, &spec, &sys, &evo.with_reference_energy(solved.energy)) {
        Ok(result) => {
            emit(out, |w| Ok(write_evolution_csv(w, &result)?))?;
            Ok(Outcome::Positive)
        }
        Err(ptnlse_core::Error::UnstableRun {
            time,
            limit,
            partial,
        }) => {
            emit(out, |w| Ok(write_evolution_csv(w, &partial)?))?;
            eprintln!("evolution became unstable at t = {time} (|psi| exceeded {limit:e}); partial series written");
            Ok(Outcome::Negative)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn run_derive(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = compare_printed(&potential(cfg)?, &system(cfg)?)?;
    emit(cfg.output.as_deref(), |w| {
        write!(w, "{report}").map_err(io_err(Path::new("<output>")))
    })?;
    Ok(Outcome::Positive)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Solve,
    Verify,
}

#[derive(Serialize)]
struct SweepLine<'a> {
    point: &'a Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn sweep_point(base: &RunConfig, point: &Point, mode: SweepMode) -> Result<String, CliError> {
    let cfg = point.config(base)?;
    let result = match mode {
        SweepMode::Solve => solve_json(&cfg),
        SweepMode::Verify => verify_json(&cfg),
    };
    let line = match result {
        Ok((json, _)) => SweepLine {
            point,
            report: Some(RawValue::from_string(json).map_err(|e| CliError::Usage(e.to_string()))?),
            error: None,
        },
        Err(e) => SweepLine {
            point,
            report: None,
            error: Some(e.to_string()),
        },
    };
    Ok(to_json(&line)?)
}

/// Worker count from [`THREADS_VAR`], if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "{THREADS_VAR}: expected a positive integer, got '{v}'"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Evaluates every point of the sweep file concurrently and writes one JSON
/// line per point, in input order. Per-point failures become `error` lines.
pub fn run_sweep(base: &RunConfig, file: &Path, mode: SweepMode) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(file).map_err(io_err(file))?;
    let axes = parse_sweep(&text)?;
    let pts = points(&axes);
    // surface malformed values before any work is done
    for axis in &axes {
        for v in &axis.values {
            base.clone().apply(&axis.key, v)?;
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let lines: Vec<Result<String, CliError>> =
        pool.install(|| pts.par_iter().map(|p| sweep_point(base, p, mode)).collect());
    emit(base.output.as_deref(), |w| {
        for line in lines {
            writeln!(w, "{}", line?).map_err(io_err(Path::new("<output>")))?;
        }
        Ok(())
    })?;
    Ok(Outcome::Positive)
}
