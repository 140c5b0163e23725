//! Command implementations behind the `qmf` binary.
//!
//! Every option can come from a flag or from a `key=value` file passed with
//! `--config`; flags win. Keys are the long flag names without dashes in
//! front (`p-cx`, `out-dir`, ...). Output files repeat the resolved
//! configuration as `# key=value` lines, so any output can be fed back as
//! `--config` to rerun it.

// A closed stdout (e.g. piped into `head`) is not an error.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

mod appendix;
mod commands;
mod settings;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use appendix::{appendix_c, AppendixParams, AppendixResult};
pub use settings::{BackendName, Settings};

use crate::Error;

/// Empirically chosen noisy-backend default: a 7% total over the single
/// CSWAP (8 CNOT-equivalents) of a 2-point template by 4-point data circuit.
pub const DEFAULT_P_CX: f64 = 0.07 / 8.0;
/// Empirically chosen: a 7% total over the same circuit's three output bits.
pub const DEFAULT_P_RO: f64 = 0.07 / 3.0;

#[derive(Debug, Parser)]
#[command(name = "qmf", version, about = "Hybrid quantum-classical Monte Carlo matched filtering")]
pub struct Cli {
    /// Worker threads for parallel runs (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Master seed; a random one is chosen and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shots per (segment, chunk) run.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Data segment length, or `auto`.
    #[arg(long)]
    pub kd: Option<String>,
    /// Template chunk length.
    #[arg(long)]
    pub kt: Option<usize>,
    #[arg(long)]
    pub margin: Option<f64>,
    /// Comma-separated list of classical, exact, ideal, statevector, noisy.
    #[arg(long)]
    pub backend: Option<String>,
    /// Fault probability per CNOT-equivalent for the noisy backend.
    #[arg(long = "p-cx")]
    pub p_cx: Option<f64>,
    /// Readout flip probability per bit for the noisy backend.
    #[arg(long = "p-ro")]
    pub p_ro: Option<f64>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
    /// `key=value` file; any output file of this tool also works.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Matched-filter a data series with a template.
    Filter(FilterArgs),
    /// Template [2,-1] against random 4-point datasets, noiseless and noisy.
    #[command(name = "appendix-c")]
    AppendixC(AppendixArgs),
    /// Low-pass, downsample and whiten a series.
    Condition(ConditionArgs),
    /// Welch power spectral density of a series.
    Psd(PsdArgs),
    /// Synthesize chirps and noise, or inject one series into another.
    Synth(SynthArgs),
    /// Show the segmentation of a problem.
    Plan(PlanArgs),
    /// Qubit and gate counts of a problem.
    Resources(PlanArgs),
    /// Compare an SNR series against a reference.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub template: Option<String>,
    #[arg(long)]
    pub data: Option<String>,
    /// uniform or weighted.
    #[arg(long)]
    pub allocation: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct AppendixArgs {
    #[arg(long)]
    pub datasets: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ConditionArgs {
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long = "out-rate")]
    pub out_rate: Option<f64>,
    /// Whiten with this PSD instead of estimating one from the input.
    #[arg(long)]
    pub psd: Option<String>,
    #[arg(long = "psd-segment")]
    pub psd_segment: Option<usize>,
    #[arg(long)]
    pub taper: Option<f64>,
    /// Stop after downsampling.
    #[arg(long = "no-whiten")]
    pub no_whiten: bool,
    #[arg(long)]
    pub output: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct PsdArgs {
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub segment: Option<usize>,
    #[arg(long)]
    pub overlap: Option<usize>,
    /// hann or rectangular.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub output: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub kind: SynthKind,
}

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    Chirp(ChirpArgs),
    Noise(NoiseArgs),
    Inject(InjectArgs),
}

#[derive(Debug, Args)]
pub struct ChirpArgs {
    #[arg(long = "f-start")]
    pub f_start: Option<f64>,
    #[arg(long = "f-end")]
    pub f_end: Option<f64>,
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub taper: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub output: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub length: Option<usize>,
    /// White noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Power-law spectrum `level·(knee/max(f, knee))^exponent` instead of white.
    #[arg(long)]
    pub exponent: Option<f64>,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub knee: Option<f64>,
    /// Shape the noise to this PSD file instead.
    #[arg(long)]
    pub psd: Option<String>,
    #[arg(long)]
    pub output: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct InjectArgs {
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub signal: Option<String>,
    #[arg(long)]
    pub at: Option<usize>,
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub output: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub template: Option<String>,
    #[arg(long)]
    pub data: Option<String>,
    /// Template length, when no template file is given.
    #[arg(long = "template-len")]
    pub template_len: Option<usize>,
    /// Data length, when no data file is given.
    #[arg(long = "data-len")]
    pub data_len: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub estimate: Option<String>,
    #[arg(long)]
    pub truth: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Failure class, mapped one-to-one onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Internal,
    Config,
    Data,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Internal => 1,
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Data, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Internal, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self.kind {
            ErrorKind::Internal => "internal error",
            ErrorKind::Config => "configuration error",
            ErrorKind::Data => "data error",
        };
        write!(f, "{label}: {}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::InvalidParameter(_)
            | Error::InfeasiblePlan(_)
            | Error::QubitCapExceeded { .. }
            | Error::LagOutOfRange { .. } => ErrorKind::Config,
            Error::LengthMismatch { .. }
            | Error::SampleRateMismatch { .. }
            | Error::EmptySeries
            | Error::NonFinite { .. }
            | Error::ZeroNorm
            | Error::Parse { .. }
            | Error::BitstringWidth { .. } => ErrorKind::Data,
            Error::Io(_) | Error::NotPowerOfTwo(_) | Error::OverlappingRegisters | Error::InvalidGate(_) => ErrorKind::Internal,
        };
        Self { kind, message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qmf: {e}");
            e.kind.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::config("--workers must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::internal(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Filter(a) => commands::filter(a),
        Command::AppendixC(a) => commands::appendix(a),
        Command::Condition(a) => commands::condition(a),
        Command::Psd(a) => commands::psd(a),
        Command::Synth(a) => match a.kind {
            SynthKind::Chirp(a) => commands::synth_chirp(a),
            SynthKind::Noise(a) => commands::synth_noise(a),
            SynthKind::Inject(a) => commands::synth_inject(a),
        },
        Command::Plan(a) => commands::plan(a),
        Command::Resources(a) => commands::resources(a),
        Command::Compare(a) => commands::compare(a),
    })
}
