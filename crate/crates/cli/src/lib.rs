//! Command-line front end for `padeclust`.
//!
//! Every command returns an exit code: 0 success, 1 usage or config error,
//! 2 domain error (degenerate system, missing data), 3 invariant breach.

mod commands;
pub mod manifest;
pub mod plot;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use padeclust::{Error, Precision};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "padeclust",
    version,
    about = "Padé approximants of random power series and the clustering of their zeros"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute an [m,n] Padé pair.
    Pade(PadeArgs),
    /// Roots of the polynomial with the given coefficients.
    Roots(RootsArgs),
    /// Clustering metrics of a polynomial's zeros.
    ClusterReport(ReportArgs),
    /// Monte Carlo protocols.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Render SVG charts from a run directory.
    Plot(PlotArgs),
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Run a protocol and write a run directory.
    Run(RunArgs),
    /// Print the default config of a protocol.
    Config { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Double,
    Extended,
    Auto,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
            PrecisionArg::Auto => Precision::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    /// Comma-separated coefficients a_0,a_1,...
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "coeffs_file"
    )]
    pub coeffs: Option<Vec<f64>>,
    /// File of coefficients separated by commas or whitespace.
    #[arg(long)]
    pub coeffs_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PadeArgs {
    #[command(flatten)]
    pub input: CoeffArgs,
    /// Numerator degree.
    #[arg(long)]
    pub m: usize,
    /// Denominator degree.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub input: CoeffArgs,
    #[arg(long, value_enum, default_value = "auto")]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Also write roots.csv into this directory (for `plot`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: CoeffArgs,
    #[arg(long, value_enum, default_value = "auto")]
    pub precision: PrecisionArg,
    /// Relative annulus widths for the radial check.
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2])]
    pub rho: Vec<f64>,
    /// Sector grid size.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Size of the test-function family for the bounded-Lipschitz estimate.
    #[arg(long, default_value_t = 16)]
    pub family: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Protocol name, e.g. et-clustering.
    pub name: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Run directory (default: runs/<name>-seed<seed>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionArg>,
    /// Format of the summary printed to stdout.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Run directory containing trials.csv and/or roots.csv.
    pub dir: PathBuf,
    /// Where to write the SVGs (default: the run directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// An error with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVARIANT,
            message: message.into(),
        }
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
            Error::InvalidConfig(_) | Error::InvalidArgument(_) | Error::Json(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::domain(e.to_string())
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match commands::dispatch(cli.command, &mut stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
