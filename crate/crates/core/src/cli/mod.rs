//! Command-line driver: experiment sweeps written as CSV, plus a self-test.

mod config;
mod experiments;
mod selftest;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::FrameError;

pub use config::{parse_float_list, parse_index_range, Experiment, ExperimentConfig, MRule, DEFAULT_EPSILON, DEFAULT_PROBES};
pub use experiments::run;
pub use selftest::{selftest, SelftestReport};

/// Failure of a CLI invocation, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Frame(#[from] FrameError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("self-test failed")]
    SelftestFailed,
}

impl CliError {
    /// `2` for numerical breakdown, `1` for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Frame(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "frameapprox", version, about = "Frame approximation experiments with truncated-SVD least squares")]
#[command(args_override_self = true)]
pub struct Cli {
    /// File of `key = value` lines; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pointwise error at the probes as N grows, with M given by --M-rule.
    #[command(name = "pointwise_error")]
    PointwiseError(ExperimentArgs),
    /// Pointwise error as M grows for fixed N.
    #[command(name = "oversampling")]
    Oversampling(ExperimentArgs),
    /// κ, λ and A' over oversampling factors and N.
    #[command(name = "constants")]
    Constants(ExperimentArgs),
    /// Stable sampling rate for each N.
    #[command(name = "ssr")]
    Ssr(ExperimentArgs),
    /// One approximation evaluated at the probes.
    #[command(name = "single_approx")]
    SingleApprox(ExperimentArgs),
    /// Analytic checks and bound invariants; pass/fail per line.
    #[command(name = "selftest")]
    Selftest(SelftestArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    /// Orthonormal Legendre basis.
    Onb,
    /// ONB plus one normalized log function.
    Onb1,
    /// ONB plus K log-weighted Legendre polynomials.
    Onbk,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum NodesArg {
    Chebyshev,
    Legendre,
    Equispaced,
    /// Inner products with the Legendre basis.
    Inner,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    /// Unweighted for Chebyshev, quadrature weights otherwise.
    Auto,
    Unweighted,
    Quadrature,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    /// Frame-constant form for inner products, richness form for points.
    Auto,
    FrameConstant,
    DataRichness,
}

#[derive(Args, Debug, Default, Clone)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    /// Number of log-weighted elements for `--frame onbk`.
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Divide each enrichment element by the norm of log.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub normalize_psi: Option<bool>,
    #[arg(long, value_enum)]
    pub nodes: Option<NodesArg>,
    #[arg(long, value_enum)]
    pub weighting: Option<WeightingArg>,
    /// Samples per N: `2N`, `1.5N`, `N` or a fixed count.
    #[arg(long = "M-rule")]
    pub m_rule: Option<String>,
    /// Total frame sizes: `a:s:b` (inclusive) or a comma list.
    #[arg(long = "N")]
    pub n: Option<String>,
    /// Sample counts for `oversampling`: `a:s:b` or a comma list.
    #[arg(long = "M")]
    pub m: Option<String>,
    /// Truncation thresholds, comma separated.
    #[arg(long)]
    pub eps: Option<String>,
    /// Oversampling factors for `constants`, comma separated.
    #[arg(long)]
    pub gammas: Option<String>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,
    /// Stride of the SSR search.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Largest M tried by the SSR search.
    #[arg(long = "M-max")]
    pub m_max: Option<usize>,
    /// Probe points in (0, 1], comma separated.
    #[arg(long)]
    pub probes: Option<String>,
    /// Output path; `-` writes to stdout.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct SelftestArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; stdout by default.
    #[arg(long)]
    pub out: Option<String>,
}

/// Reads `key = value` lines. Blank lines and `#` comments are skipped.
pub fn read_config_file(path: &str) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

const SUBCOMMANDS: [&str; 6] = ["pointwise_error", "oversampling", "constants", "ssr", "single_approx", "selftest"];

/// Splices config entries in front of the user's flags so the latter win.
fn merge_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    if let Some(prog) = it.next() {
        rest.push(prog);
    }
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            path = Some(
                it.next()
                    .ok_or_else(|| CliError::Config("--config needs a file".into()))?
                    .to_string_lossy()
                    .into_owned(),
            );
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };

    let entries = read_config_file(&path)?;
    let mut experiment = None;
    let mut flags = Vec::new();
    for (k, v) in entries {
        match k.as_str() {
            "experiment" => experiment = Some(v),
            "config" => return Err(CliError::Config("nested config files are not supported".into())),
            _ => flags.push(OsString::from(format!("--{}={v}", k.replace('_', "-")))),
        }
    }
    let sub_pos = rest.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let mut merged = Vec::with_capacity(rest.len() + flags.len() + 1);
    match sub_pos {
        Some(p) => {
            merged.extend(rest[..=p].iter().cloned());
            merged.extend(flags);
            merged.extend(rest[p + 1..].iter().cloned());
        }
        None => {
            let exp = experiment.ok_or_else(|| CliError::Config("no experiment given on the command line or in the config".into()))?;
            merged.push(rest[0].clone());
            merged.push(OsString::from(exp));
            merged.extend(flags);
            merged.extend(rest[1..].iter().cloned());
        }
    }
    Ok(merged)
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FRAMEAPPROX_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("FRAMEAPPROX_THREADS must be a positive integer, got {raw:?}")))?;
    // A pool may already exist when the driver runs more than once in a process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Selftest(a) => {
            let report = selftest(&crate::orthopoly::hp_rule_for_degree(40), a.seed.unwrap_or(0));
            let text = report.render();
            match a.out.as_deref() {
                None | Some("-") => stdout.write_all(text.as_bytes())?,
                Some(path) => std::fs::write(path, text)?,
            }
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::SelftestFailed)
            }
        }
        Command::PointwiseError(a) => run(&ExperimentConfig::from_args(Experiment::PointwiseError, &a)?, stdout),
        Command::Oversampling(a) => run(&ExperimentConfig::from_args(Experiment::Oversampling, &a)?, stdout),
        Command::Constants(a) => run(&ExperimentConfig::from_args(Experiment::Constants, &a)?, stdout),
        Command::Ssr(a) => run(&ExperimentConfig::from_args(Experiment::Ssr, &a)?, stdout),
        Command::SingleApprox(a) => run(&ExperimentConfig::from_args(Experiment::SingleApprox, &a)?, stdout),
    }
}

/// Runs the driver on `args` (program name first) and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let merged = match merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(merged) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(CliError::SelftestFailed) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
