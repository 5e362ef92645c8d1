//! `avn`: reproducible runs of every verification and simulation in
//! `avn-core`.
//!
//! Exit codes: 0 success, 1 verification or oracle failure, 2 usage error.

mod commands;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use avn_core::experiment::{DEFAULT_SEED, DEFAULT_SHOTS};

/// Directory that receives `<command>.<ext>` when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "AVN_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "avn",
    version,
    about = "Two-photon all-versus-nothing nonlocality toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format; csv is accepted only by tabular commands
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Master seed for all sampling
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Args)]
struct SamplingArgs {
    /// Shots per apparatus setting
    #[arg(long, default_value_t = DEFAULT_SHOTS, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,

    /// Weight of the entangled state in the white-noise mixture, in [0, 1]
    #[arg(long, default_value_t = 1.0, value_parser = parse_visibility)]
    visibility: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the nine eigenequations on the doubly entangled state
    Verify,
    /// Enumerate all local-realistic assignments and print the certificate
    Lhv,
    /// Exact and sampled Bell–Mermin value at one visibility
    Mermin(SamplingArgs),
    /// Sample one photon-1 / photon-2 apparatus pair
    Simulate {
        /// Photon-1 apparatus (1, 3 or 5) then photon-2 apparatus (2, 4 or 6)
        #[arg(long, num_args = 2, value_names = ["A1", "A2"], required = true)]
        apparatus_pair: Vec<u8>,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Exact and sampled <O> over a grid of visibilities
    Sweep {
        /// Comma-separated visibilities; defaults to a grid around 7/9
        #[arg(long, value_delimiter = ',', value_parser = parse_visibility)]
        grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_SHOTS, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
    },
    /// Run the single-photon Bell-state analyzer
    Bell {
        /// psi+, psi-, phi+, phi- or random
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Lhv => "lhv",
            Command::Mermin(_) => "mermin",
            Command::Simulate { .. } => "simulate",
            Command::Sweep { .. } => "sweep",
            Command::Bell { .. } => "bell",
        }
    }

    fn is_tabular(&self) -> bool {
        !matches!(self, Command::Lhv | Command::Mermin(_))
    }

    fn default_format(&self) -> Format {
        match self {
            Command::Sweep { .. } => Format::Csv,
            _ => Format::Text,
        }
    }
}

fn parse_visibility(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{s:?} is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("visibility {v} is outside [0, 1]"))
    }
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
}

/// A rendered report and whether its self-checks passed.
pub struct Report {
    pub body: String,
    pub failure: Option<String>,
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    if format == Format::Csv && !cli.command.is_tabular() {
        return Err(Failure::Usage(format!(
            "--format csv is not available for `{}`",
            cli.command.name()
        )));
    }
    match &cli.command {
        Command::Verify => commands::verify(format),
        Command::Lhv => commands::lhv(format),
        Command::Mermin(s) => commands::mermin(format, s.shots, s.visibility, cli.seed),
        Command::Simulate {
            apparatus_pair,
            sampling,
        } => commands::simulate(
            format,
            apparatus_pair[0],
            apparatus_pair[1],
            sampling.shots,
            sampling.visibility,
            cli.seed,
        ),
        Command::Sweep { grid, shots } => commands::sweep(format, grid.clone(), *shots, cli.seed),
        Command::Bell { state, shots } => commands::bell(format, state, *shots, cli.seed),
    }
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let target = cli.output.clone().or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV).map(|dir| {
            PathBuf::from(dir).join(format!("{}.{}", cli.command.name(), format.extension()))
        })
    });
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, body)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if let Err(e) = emit(&cli, &report.body) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            match report.failure {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("check failed: {msg}");
                    ExitCode::from(1)
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
