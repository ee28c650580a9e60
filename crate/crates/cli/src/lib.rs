//! `qig`: single-instance evaluations, verification campaigns and function
//! reports.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod eval;
pub mod functions;
pub mod report;
pub mod verify;

pub use verify::{run_campaign, CampaignConfig, CampaignReport, ChannelKind, ChannelSource, Check};

/// Every inequality held.
pub const EXIT_OK: u8 = 0;
/// Usage, parse or I/O error.
pub const EXIT_USAGE: u8 = 1;
/// At least one verdict violated its inequality.
pub const EXIT_VIOLATION: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "qig", version, about = "Monotone metrics, generalized covariances and uncertainty inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one quantity on states and observables read from matrix JSON files.
    Eval(EvalArgs),
    /// Run a randomized verification campaign and emit one verdict per line.
    Verify(VerifyArgs),
    /// Check standard-function axioms and pointwise margins.
    Functions(FunctionsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Gamma,
    Qcov,
    Cov,
    Skew,
    TildeResidual,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub quantity: Quantity,
    /// Function spec, e.g. `wy` or `tilde(kosaki:0.3)`.
    #[arg(long = "f", default_value = "sld")]
    pub f: String,
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub a: PathBuf,
    /// Second argument; defaults to `--a`.
    #[arg(long)]
    pub b: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub check: Check,
    /// Hilbert space dimension; repeat for several.
    #[arg(long = "dim", default_values_t = [3])]
    pub dims: Vec<usize>,
    /// Number of observables.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// Comma separated function specs; defaults to the whole catalog.
    #[arg(long = "f")]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    /// Trials per dimension.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance for `holds`.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = ChannelKind::Random)]
    pub channel_kind: ChannelKind,
    /// Channel JSON file; overrides `--channel-kind` and `--dim`.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct FunctionsArgs {
    /// Comma separated function specs; defaults to the whole catalog.
    #[arg(long)]
    pub list: Option<String>,
    /// Untrusted probe functions (`xsq`, `sqrt`); repeatable.
    #[arg(long)]
    pub probe: Vec<String>,
    /// Trials for the 2x2 operator monotonicity spot check.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = TableFormat::Table)]
    pub format: TableFormat,
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<u8> {
    match cli.command {
        Command::Eval(args) => {
            eval::run(&args, out)?;
            Ok(EXIT_OK)
        }
        Command::Functions(args) => {
            functions::run(&args, out)?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let config = CampaignConfig::from_args(&args)?;
            let start = Instant::now();
            let report = run_campaign(&config)?;
            let mut file;
            let sink: &mut dyn Write = match &args.out {
                Some(path) => {
                    file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
                    &mut file
                }
                None => out,
            };
            match args.format {
                OutputFormat::Json => report::write_json_lines(sink, &report)?,
                OutputFormat::Csv => {
                    report::write_csv(sink, &report.records)?;
                    writeln!(err, "{}", serde_json::to_string(&report.summary())?)?;
                }
            }
            sink.flush()?;
            writeln!(err, "wall time: {:.3} s", start.elapsed().as_secs_f64())?;
            Ok(if report.violations > 0 { EXIT_VIOLATION } else { EXIT_OK })
        }
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub(crate) fn require(cond: bool, msg: &str) -> anyhow::Result<()> {
    if !cond {
        bail!("{msg}");
    }
    Ok(())
}
