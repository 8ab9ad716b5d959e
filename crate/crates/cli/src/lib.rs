//! Command-line front end for the `grushin-core` solvers and audits.
//!
//! ```text
//! grushin <solve|mpa|pohozaev|eigen|embed|sweep|check> --config <path>
//!         [--out <dir>] [--format csv|json] [--seed <u64>]
//! ```
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use config::{Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Nehari-manifold ground state.
    Solve,
    /// Mountain-pass critical point.
    Mpa,
    /// Pohozaev audit of a saved field.
    Pohozaev,
    /// Smallest eigenvalue of the operator.
    Eigen,
    /// Embedding-constant estimate.
    Embed,
    /// Parameter/refinement sweep.
    Sweep,
    /// Hypothesis spot-checks for the nonlinearity.
    Check,
}

#[derive(Debug, Parser)]
#[command(
    name = "grushin",
    version,
    about = "Semilinear Grushin Dirichlet solver and audits"
)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
}

/// A fully validated invocation.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Invocation {
    pub fn new(
        command: Command,
        mut config: RunConfig,
        out: Option<PathBuf>,
        format: Option<Format>,
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        if let Some(s) = seed {
            config.seed = s;
        }
        let format = format.unwrap_or(config.format);
        config.format = format;
        let out_dir = out
            .or_else(|| config.out_dir.clone())
            .ok_or_else(|| CliError::Config("config: missing `out_dir` (or --out)".into()))?;
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| CliError::Config(format!("output: cannot create {}: {e}", out_dir.display())))?;
        Ok(Invocation {
            command,
            config,
            out_dir,
            format,
        })
    }

    pub fn execute(&self) -> Result<(), CliError> {
        match self.command {
            Command::Solve => commands::cmd_solve(self).map(drop),
            Command::Mpa => commands::cmd_mpa(self).map(drop),
            Command::Pohozaev => commands::cmd_pohozaev(self).map(drop),
            Command::Eigen => commands::cmd_eigen(self).map(drop),
            Command::Embed => commands::cmd_embed(self).map(drop),
            Command::Sweep => commands::cmd_sweep(self).map(drop),
            Command::Check => commands::cmd_check(self).map(drop),
        }
    }
}

fn run_args(args: Args) -> Result<(), CliError> {
    let config = RunConfig::load(&args.config)?;
    Invocation::new(args.command, config, args.out, args.format, args.seed)?.execute()
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are printed to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_args(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
