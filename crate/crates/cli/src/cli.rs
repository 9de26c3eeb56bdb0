//! Argument parsing and exit-code mapping.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{
    run_derive, run_evolve, run_solve, run_sweep, run_verify, CliError, SweepMode,
};
use crate::config::{parse_config, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "ptnlse",
    version,
    about = "Exact solutions of the NLSE with PT-symmetric potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the consistency conditions and print the report as JSON
    Solve(RunArgs),
    /// Construct the solution and verify it on a grid
    Verify(RunArgs),
    /// Propagate the solution in time and write a CSV series
    Evolve(RunArgs),
    /// Compare the printed consistency conditions against the derived ones
    Derive(RunArgs),
    /// Evaluate every point of a parameter sweep file, one JSON line each
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Solve,
    Verify,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Sweep file: `key = a, b, c` or `key = start:stop:count` per line
    file: PathBuf,
    #[arg(long, value_enum, default_value = "solve")]
    mode: Mode,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Default, Args)]
struct RunArgs {
    /// Flat key=value file; flags override its settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    /// Well depth
    #[arg(long = "A", allow_hyphen_values = true)]
    a: Option<String>,
    /// Gain/loss strength
    #[arg(long = "B", allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long = "half-width", allow_hyphen_values = true)]
    half_width: Option<String>,
    #[arg(long = "n-points", allow_hyphen_values = true)]
    n_points: Option<String>,
    /// Explicit grid interval `lo:hi`
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    #[arg(long = "t-final", allow_hyphen_values = true)]
    t_final: Option<String>,
    /// Record diagnostics every this many steps
    #[arg(long, allow_hyphen_values = true)]
    stride: Option<String>,
    /// Amplitude axis: real+, real-, imag+ or imag-
    #[arg(long, allow_hyphen_values = true)]
    quadrant: Option<String>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    csv: Option<String>,
}

impl RunArgs {
    /// `(config key, flag, value)` for every flag given.
    fn flags(&self) -> Vec<(&'static str, &'static str, &str)> {
        [
            ("family", "--family", &self.family),
            ("A", "--A", &self.a),
            ("B", "--B", &self.b),
            ("alpha", "--alpha", &self.alpha),
            ("g", "--g", &self.g),
            ("mu", "--mu", &self.mu),
            ("half_width", "--half-width", &self.half_width),
            ("n_points", "--n-points", &self.n_points),
            ("interval", "--interval", &self.interval),
            ("dt", "--dt", &self.dt),
            ("t_final", "--t-final", &self.t_final),
            ("stride", "--stride", &self.stride),
            ("quadrant", "--quadrant", &self.quadrant),
            ("output", "--output", &self.output),
            ("csv", "--csv", &self.csv),
        ]
        .into_iter()
        .filter_map(|(k, f, v)| v.as_deref().map(|v| (k, f, v)))
        .collect()
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let pairs = parse_config(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            cfg.apply_all(&pairs)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        }
        for (key, flag, value) in self.flags() {
            cfg.apply(key, value)
                .map_err(|e| CliError::Usage(format!("{flag}: {e}")))?;
        }
        Ok(cfg)
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    let outcome = match command {
        Command::Solve(a) => run_solve(&a.resolve()?)?,
        Command::Verify(a) => run_verify(&a.resolve()?)?,
        Command::Evolve(a) => run_evolve(&a.resolve()?)?,
        Command::Derive(a) => run_derive(&a.resolve()?)?,
        Command::Sweep(s) => {
            let mode = match s.mode {
                Mode::Solve => SweepMode::Solve,
                Mode::Verify => SweepMode::Verify,
            };
            run_sweep(&s.run.resolve()?, &s.file, mode)?
        }
    };
    Ok(outcome.exit_code())
}

/// Runs the tool on `args` (program name first) and returns the exit code:
/// 0 success, 1 usage or runtime error, 2 completed with a negative outcome.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
