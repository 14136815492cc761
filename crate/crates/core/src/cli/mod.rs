//! Command-line front end.
//!
//! ```text
//! cavity-kraus evolve     [flags]   # analytic ρ(t) over a θ × t grid
//! cavity-kraus compare    [flags]   # discrete vs analytic records
//! cavity-kraus kraus-dump [flags]   # exact Kraus set entries
//! ```
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical or regime
//! error, 3 I/O error.

pub mod config;
pub mod scenarios;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
pub use config::{load_config, ConfigError, Grid, JumpChoice, OperatorNorm, Overrides, ScenarioConfig};
pub use scenarios::{run_compare, run_evolve, run_kraus_dump};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical(Error, String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(..) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration error: {e}"),
            CliError::Numerical(e, ctx) if ctx.is_empty() => write!(f, "numerical error: {e}"),
            CliError::Numerical(e, ctx) => write!(f, "numerical error ({ctx}): {e}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter { .. } | Error::Normalization { .. } => CliError::Config(ConfigError {
                line: None,
                message: e.to_string(),
            }),
            other => CliError::Numerical(other, String::new()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cavity-kraus", version, about = "Atom-cavity-reservoir Kraus-map simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic ρ(t) over a θ × t grid.
    Evolve(CommonArgs),
    /// Discrete differential-Kraus evolution against the analytic one.
    Compare(CommonArgs),
    /// Entries of the exact Kraus set at each configured time.
    KrausDump(CommonArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// Config file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Decay rate κ.
    #[arg(long, value_name = "KAPPA", value_parser = number)]
    pub decay: Option<f64>,
    /// Atom–cavity coupling Ω.
    #[arg(long, value_name = "OMEGA_RABI", value_parser = number)]
    pub coupling: Option<f64>,
    /// Atomic/cavity frequency ω.
    #[arg(long, value_name = "OMEGA", value_parser = number)]
    pub frequency: Option<f64>,
    /// Initial-state angle: `value` or `start:end:count` (`pi` allowed).
    #[arg(long, value_name = "GRID", value_parser = grid)]
    pub theta: Option<Grid>,
    /// Time: `value` or `start:end:count`.
    #[arg(long, value_name = "GRID", value_parser = grid)]
    pub time: Option<Grid>,
    /// Comma-separated discrete step counts.
    #[arg(long, value_name = "N,...", value_parser = steps)]
    pub steps: Option<StepList>,
    /// Jump amplitudes: `split`, `single`, or `list:l1,l2,...`.
    #[arg(long, value_name = "SPEC", value_parser = jumps)]
    pub jumps: Option<JumpChoice>,
    /// Divide by the trace after every discrete step.
    #[arg(long)]
    pub renormalize: bool,
    /// Add per-operator norms to `evolve` rows.
    #[arg(long)]
    pub per_operator: bool,
    /// Norm for `--per-operator`: `sandwich` (‖KρK†‖) or `left` (‖Kρ‖).
    #[arg(long, value_name = "KIND", value_parser = operator_norm)]
    pub operator_norm: Option<OperatorNorm>,
    #[arg(long)]
    pub seed: Option<u64>,
}

fn number(s: &str) -> Result<f64, String> {
    config::parse_number(s)
}
fn grid(s: &str) -> Result<Grid, String> {
    config::parse_grid(s)
}
/// Parsed `--steps` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepList(pub Vec<usize>);

fn steps(s: &str) -> Result<StepList, String> {
    config::parse_steps(s).map(StepList)
}
fn jumps(s: &str) -> Result<JumpChoice, String> {
    config::parse_jumps(s)
}
fn operator_norm(s: &str) -> Result<OperatorNorm, String> {
    config::parse_operator_norm(s)
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            kappa: self.decay,
            rabi: self.coupling,
            omega: self.frequency,
            theta: self.theta,
            time: self.time,
            n_list: self.steps.clone().map(|s| s.0),
            jumps: self.jumps.clone(),
            renormalize: self.renormalize.then_some(true),
            per_operator: self.per_operator.then_some(true),
            operator_norm: self.operator_norm,
            output_path: self.out.clone(),
            seed: self.seed,
        }
    }

    pub fn resolve(&self) -> Result<ScenarioConfig, ConfigError> {
        load_config(self.config.as_deref(), &self.overrides())
    }
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let (args, kind) = match &cli.command {
        Command::Evolve(a) => (a, "evolve"),
        Command::Compare(a) => (a, "compare"),
        Command::KrausDump(a) => (a, "kraus-dump"),
    };
    let cfg = args.resolve()?;
    let to_stdout = cfg.output_path.is_none();
    let mut sink: Box<dyn Write> = match &cfg.output_path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };

    match kind {
        "evolve" => {
            let rows = run_evolve(&cfg, &mut sink)?;
            log::info!("wrote {rows} evolve rows");
        }
        "compare" => {
            let summary = run_compare(&cfg, &mut sink)?;
            drop(sink);
            // Keep stdout a clean CSV when it carries the table.
            if to_stdout {
                eprintln!("{}", summary.report());
            } else {
                println!("{}", summary.report());
            }
        }
        _ => run_kraus_dump(&cfg, &mut sink)?,
    }
    Ok(())
}

/// Parses `argv`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cavity-kraus: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse_into_overrides() {
        let cli = Cli::try_parse_from([
            "cavity-kraus", "compare", "--coupling", "4", "--decay", "2", "--theta", "pi/4",
            "--time", "1", "--steps", "10,100", "--jumps", "single", "--renormalize",
        ])
        .unwrap();
        let Command::Compare(args) = cli.command else { panic!("wrong subcommand") };
        let ov = args.overrides();
        assert_eq!(ov.rabi, Some(4.0));
        assert_eq!(ov.kappa, Some(2.0));
        assert_eq!(ov.theta, Some(Grid::single(std::f64::consts::FRAC_PI_4)));
        assert_eq!(ov.n_list, Some(vec![10, 100]));
        assert_eq!(ov.jumps, Some(JumpChoice::Single));
        assert_eq!(ov.renormalize, Some(true));
        assert_eq!(ov.per_operator, None);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with_args(["cavity-kraus", "evolve", "--decay", "abc"]), 1);
        assert_eq!(main_with_args(["cavity-kraus", "evolve", "--theta", "1:0:3"]), 1);
        assert_eq!(
            main_with_args(["cavity-kraus", "compare", "--jumps", "list:1", "--theta", "0", "--steps", "1"]),
            1
        );
        assert_eq!(
            main_with_args(["cavity-kraus", "kraus-dump", "--out", "/nonexistent-dir/x.csv"]),
            3
        );
    }

    #[test]
    fn library_errors_map_to_categories() {
        let e: CliError = Error::ZeroNorm.into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = Error::Normalization { excess: 1.0 }.into();
        assert_eq!(e.exit_code(), 1);
    }
}
