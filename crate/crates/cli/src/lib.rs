//! `qq`: command-line front end for the quaquaversal operator toolkit.
//!
//! Every subcommand produces a [`Report`] that renders as JSON
//! (`{command, config, results, residuals, pass}`), CSV or plain text.
//! Exit codes: 0 success, 1 failed check or refused computation, 2 usage
//! error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

mod commands;
mod verify;

pub use verify::{run_suite, CheckResult, SuiteOptions};

/// Largest `k` or `k_max` the CLI accepts.
pub const K_CAP: u32 = 200;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qq",
    version,
    about = "Spectra and block structure of the quaquaversal operator on SO(3) irreps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue clusters, realness and trace checks for one irrep.
    Spectrum(SpectrumArgs),
    /// Run the full invariant suite for k = 1..k_max.
    Verify(VerifyArgs),
    /// Block decomposition report for one irrep.
    Blocks(BlocksArgs),
    /// Spectral radius and gap for k = 1..k_max.
    GapScan(GapScanArgs),
    /// Compare cousin-orientation averages with powers of the operator.
    Moments(MomentsArgs),
    /// Predicted eigenvalue multiplicities and the candidate 1/8 counts.
    Expected(ExpectedArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the residual tolerance used for pass/fail.
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Block,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=K_CAP as i64))]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = Method::Dense)]
    pub method: Method,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=K_CAP as i64))]
    pub kmax: u32,
    /// Extra angle for the theorem check, in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, default_value = "y,x", value_parser = parse_pair)]
    #[serde(serialize_with = "display")]
    pub pair: quaquaversal::blocks::AxisPair,
    /// Seed for the random theorem angles.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BlocksArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=K_CAP as i64))]
    pub k: u32,
    #[arg(long, default_value = "y,x", value_parser = parse_pair)]
    #[serde(serialize_with = "display")]
    pub pair: quaquaversal::blocks::AxisPair,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GapScanArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=K_CAP as i64))]
    pub kmax: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=K_CAP as i64))]
    pub k: u32,
    /// Generation of cousins.
    #[arg(long = "N", short = 'N')]
    pub generation: u32,
    /// Enumerate all 8^N words (default unless --samples is given).
    #[arg(long, conflicts_with = "samples")]
    pub exact: bool,
    /// Monte Carlo sample count.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group = clap::ArgGroup::new("range").required(true).args(["k", "kmax"]))]
pub struct ExpectedArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=K_CAP as i64))]
    pub k: Option<u32>,
    /// Tabulate k = 1..k_max.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=K_CAP as i64))]
    pub kmax: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err("tolerance must be a positive number".into())
    }
}

fn parse_pair(s: &str) -> Result<quaquaversal::blocks::AxisPair, String> {
    s.parse().map_err(|e: quaquaversal::Error| e.to_string())
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// What a subcommand computed, before rendering.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub results: Value,
    pub residuals: Value,
    pub pass: bool,
    pub human: String,
    pub csv: String,
    /// One-line summary; shown on stderr when the main output is CSV.
    pub summary: Option<String>,
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "residuals": self.residuals,
            "pass": self.pass,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Human => self.human.clone(),
        }
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("QQ_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("QQ_THREADS must be a positive integer, got {raw:?}"))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(msg) => {
            return Outcome {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            }
        }
    };
    let output = cli.output().clone();
    let result = pool.install(|| commands::dispatch(&cli.command));
    match result {
        Ok(report) => emit(&report, &output),
        Err(failure) => Outcome {
            code: failure.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", failure.message),
        },
    }
}

fn emit(report: &Report, output: &OutputArgs) -> Outcome {
    let text = report.render(output.format);
    let stderr = match (&report.summary, output.format) {
        (Some(line), Format::Csv) => format!("{line}\n"),
        _ => String::new(),
    };
    match &output.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code: report.exit_code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => Outcome {
                code: EXIT_FAILED,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code: report.exit_code,
            stdout: text,
            stderr,
        },
    }
}

impl Cli {
    fn output(&self) -> &OutputArgs {
        match &self.command {
            Command::Spectrum(a) => &a.output,
            Command::Verify(a) => &a.output,
            Command::Blocks(a) => &a.output,
            Command::GapScan(a) => &a.output,
            Command::Moments(a) => &a.output,
            Command::Expected(a) => &a.output,
        }
    }
}

/// A command that could not produce a report.
#[derive(Debug, Clone)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn refused(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_FAILED,
            message: message.into(),
        }
    }
}

impl From<quaquaversal::Error> for Failure {
    fn from(e: quaquaversal::Error) -> Self {
        Failure::refused(e.to_string())
    }
}
