//! `zpf-orbit`: verification suite, coefficient tables, force sweeps and the
//! self-consistent orbit solve on top of `zpf-core`.
//!
//! Machine output goes to `--out PATH` or, without it, to stdout. Human
//! summaries go to stdout when `--out` is given and to stderr otherwise.

pub mod commands;
pub mod manifest;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "ZPF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "zpf-orbit", version, about = "Vacuum force on a rotating dipole oscillator")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol_rel: f64,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-14)]
    pub tol_abs: f64,
    /// Harmonic cutoff for force series.
    #[arg(long, global = true, default_value_t = 12)]
    pub n_max: usize,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Published harmonic combination, or the sum of the computed components.
    #[arg(long, global = true, value_enum, default_value_t = AssemblyArg::Paper)]
    pub assembly: AssemblyArg,
    /// Machine output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write machine output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Pin the manifest timestamp (RFC 3339) for byte-stable reruns.
    #[arg(long, global = true)]
    pub timestamp: Option<String>,
    /// Corrupt the named verify check (harness self-test).
    #[arg(long, global = true, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AssemblyArg {
    Paper,
    Components,
}

impl From<AssemblyArg> for zpf_core::Assembly {
    fn from(a: AssemblyArg) -> Self {
        match a {
            AssemblyArg::Paper => zpf_core::Assembly::Paper,
            AssemblyArg::Components => zpf_core::Assembly::Components,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Jtilde,
    Xn,
    J1n,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the acceptance checks.
    Verify {
        /// Run only these checks (repeatable).
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Realizations for the Monte Carlo check.
        #[arg(long, default_value_t = 10_000)]
        mc_samples: usize,
    },
    /// Tabulate harmonic coefficients over a range such as 1..6.
    Table {
        #[arg(value_enum)]
        what: TableKind,
        range: String,
    },
    /// Force breakdown over a β × ΓΩ₀ grid.
    Sweep {
        /// Comma-separated β values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        beta: Vec<f64>,
        /// Comma-separated ΓΩ₀ values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        gamma_omega: Vec<f64>,
        /// ω₀/Ω₀ for every grid point.
        #[arg(long, default_value_t = 0.0)]
        omega0: f64,
        #[arg(long, default_value_t = zpf_core::DEFAULT_INV_ALPHA)]
        inv_alpha: f64,
    },
    /// Solve the force balance for the free circular orbit.
    Solve {
        #[arg(long, default_value_t = zpf_core::DEFAULT_INV_ALPHA)]
        inv_alpha: f64,
        #[arg(long, default_value_t = 1)]
        n_terms: usize,
    },
}

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Io = 1,
    Usage = 2,
    OutOfRegime = 3,
    AcceptanceFailure = 4,
    NonConvergence = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            status: Status::Usage,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            status: Status::Io,
            message: message.into(),
        }
    }
}

impl From<zpf_core::Error> for Failure {
    fn from(e: zpf_core::Error) -> Self {
        use zpf_core::Error;
        let status = match e {
            Error::OutOfRegime(_) => Status::OutOfRegime,
            Error::NonConvergence { .. } | Error::NoRoot { .. } => Status::NonConvergence,
            Error::Domain(_) | Error::Pole(_) => Status::Usage,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

/// Result of a command: bytes to emit, a human summary and the exit status.
pub struct Report {
    pub body: Vec<u8>,
    pub summary: String,
    pub status: Status,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::io(e.to_string()))
}

fn emit(common: &Common, report: &Report) -> Result<(), Failure> {
    use std::io::Write;
    match &common.out {
        Some(path) => {
            std::fs::write(path, &report.body).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            print!("{}", report.summary);
        }
        None => {
            std::io::stdout()
                .write_all(&report.body)
                .map_err(|e| Failure::io(e.to_string()))?;
            eprint!("{}", report.summary);
        }
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<Status, Failure> {
    configure_threads()?;
    let report = commands::dispatch(&cli)?;
    emit(&cli.common, &report)?;
    Ok(report.status)
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Usage as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status as u8)
        }
    }
}
