//! Command-line experiment runner.
//!
//! Subcommands reproduce the laboratory's figures and tables as
//! machine-readable data (`regions`, `fig3a`, `fig3b`, `bounds-table`,
//! `max-search`) and drive the randomized property suites (`verify`).
//! Configuration comes from flags, an optional flat key-value JSON config
//! file, and defaults, in that precedence order; identical configuration
//! and seed produce byte-identical output files.
//!
//! Exit codes: 0 success, 1 suite or computation failure, 2 invalid
//! configuration, 3 I/O failure. `MDRLAB_THREADS` caps worker threads.

mod commands;
mod output;

pub use commands::run;
pub use output::{fmt_float, write_atomic, Column, OutputFormat, Table};

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::mdr::MdrId;
use crate::verify::SuiteId;

/// Errors carrying the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration: exit code 2.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// I/O failure: exit code 3.
    #[error("i/o failure: {0}")]
    Io(String),
    /// Suite or computation failure: exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Result alias for this module.
pub type Result<T> = std::result::Result<T, CliError>;

/// Numerical laboratory for measurement-disturbance relations and the
/// correlation bounds they impose on entangled states.
#[derive(Debug, Parser)]
#[command(name = "mdrlab", version, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Available subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace each relation's allowed-region boundary in the (eps, eta) plane.
    Regions(CommonArgs),
    /// Sweep the meter angle and tabulate the correlation sum against each bound.
    Fig3a(CommonArgs),
    /// Sweep the meter angle and tabulate the CHSH pair sum against each cap.
    Fig3b(CommonArgs),
    /// Tabulate each relation's catalog constant and correlation/CHSH caps.
    BoundsTable(CommonArgs),
    /// Run the randomized property suites; nonzero exit on any failure.
    Verify(VerifyArgs),
    /// Random-restart search for the largest reachable correlation sum.
    MaxSearch(CommonArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Seed for every stochastic component.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (directory for `regions`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Comma-separated relation labels among he,oz,ha,we,b1,b2; default all.
    #[arg(long)]
    pub mdr: Option<String>,
    /// Point count for sweeps and boundary traces
    /// (default 721 for sweeps, 4097 for `regions`).
    #[arg(long)]
    pub theta_count: Option<usize>,
    /// Restart count for stochastic searches.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Flat key-value JSON config file; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Extra flags for `verify`.
#[derive(Debug, Default, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated suite labels among prop1,two-route,gamma-kappa,lambda,max-corr; default all.
    #[arg(long)]
    pub suite: Option<String>,
    /// Comma-separated local dimensions for the randomized suites.
    #[arg(long)]
    pub dims: Option<String>,
    /// Trials per suite (per dimension for prop1).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Replace the matched congruence with W V W^dag; prop1 must then fail.
    #[arg(long)]
    pub negative_control: bool,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub theta_start: f64,
    pub theta_stop: f64,
    /// Explicit point count, if any; commands fall back to their defaults.
    pub theta_count: Option<usize>,
    pub mdrs: Vec<MdrId>,
    pub seed: u64,
    pub restarts: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub suites: Vec<SuiteId>,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub negative_control: bool,
}

impl RunConfig {
    /// Sweep grid size (meter-angle sweeps).
    pub fn sweep_count(&self) -> usize {
        self.theta_count.unwrap_or(721)
    }

    /// Boundary-trace size; denser by default because the trace is
    /// interrogated for curve minima.
    pub fn boundary_count(&self) -> usize {
        self.theta_count.unwrap_or(4097)
    }

    /// Resolves flags > config file > defaults and checks the invariants.
    pub fn resolve(common: &CommonArgs, verify: Option<&VerifyArgs>) -> Result<RunConfig> {
        let file = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };

        let format = match &common.format {
            Some(s) => OutputFormat::parse(s)?,
            None => file.format.unwrap_or(OutputFormat::Csv),
        };
        let mdrs = match &common.mdr {
            Some(s) => parse_mdr_list(s)?,
            None => file
                .mdr
                .clone()
                .unwrap_or_else(|| MdrId::all().to_vec()),
        };
        let suites = match verify.and_then(|v| v.suite.as_deref()) {
            Some(s) => parse_suite_list(s)?,
            None => file
                .suite
                .clone()
                .unwrap_or_else(|| SuiteId::all().to_vec()),
        };
        let dims = match verify.and_then(|v| v.dims.as_deref()) {
            Some(s) => parse_dim_list(s)?,
            None => file.dims.clone().unwrap_or_else(|| vec![2, 3, 4, 5]),
        };

        let config = RunConfig {
            theta_start: file.theta_start.unwrap_or(0.0),
            theta_stop: file.theta_stop.unwrap_or(std::f64::consts::TAU),
            theta_count: common.theta_count.or(file.theta_count),
            mdrs,
            seed: common.seed.or(file.seed).unwrap_or(20260814),
            restarts: common.restarts.or(file.restarts).unwrap_or(50),
            out: common.out.clone().or_else(|| file.out.clone()),
            format,
            suites,
            dims,
            trials: verify
                .and_then(|v| v.trials)
                .or(file.trials)
                .unwrap_or(200),
            negative_control: verify.map(|v| v.negative_control).unwrap_or(false)
                || file.negative_control.unwrap_or(false),
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<()> {
        if let Some(count) = self.theta_count {
            if count < 2 {
                return Err(CliError::Config(format!(
                    "theta-count must be at least 2, got {count}"
                )));
            }
        }
        if !(self.theta_stop > self.theta_start) {
            return Err(CliError::Config(format!(
                "theta grid is empty: start {} >= stop {}",
                self.theta_start, self.theta_stop
            )));
        }
        if self.restarts < 1 {
            return Err(CliError::Config("restarts must be at least 1".into()));
        }
        if self.mdrs.is_empty() {
            return Err(CliError::Config("relation list must not be empty".into()));
        }
        if self.suites.is_empty() {
            return Err(CliError::Config("suite list must not be empty".into()));
        }
        if self.trials < 1 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.dims.is_empty() {
            return Err(CliError::Config("dimension list must not be empty".into()));
        }
        for &d in &self.dims {
            if !(2..=crate::tol::MAX_DIM).contains(&d) {
                return Err(CliError::Config(format!(
                    "dimension {d} outside the supported range 2..={}",
                    crate::tol::MAX_DIM
                )));
            }
        }
        Ok(())
    }
}

/// Parses a comma-separated relation list.
fn parse_mdr_list(s: &str) -> Result<Vec<MdrId>> {
    split_list(s, "relation")?
        .iter()
        .map(|item| {
            item.parse::<MdrId>()
                .map_err(|e| CliError::Config(e.to_string()))
        })
        .collect()
}

/// Parses a comma-separated suite list.
fn parse_suite_list(s: &str) -> Result<Vec<SuiteId>> {
    split_list(s, "suite")?
        .iter()
        .map(|item| {
            item.parse::<SuiteId>()
                .map_err(|e| CliError::Config(e.to_string()))
        })
        .collect()
}

/// Parses a comma-separated dimension list.
fn parse_dim_list(s: &str) -> Result<Vec<usize>> {
    split_list(s, "dimension")?
        .iter()
        .map(|item| {
            item.parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad dimension {item:?}")))
        })
        .collect()
}

fn split_list(s: &str, what: &str) -> Result<Vec<String>> {
    let items: Vec<String> = s
        .split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect();
    if items.is_empty() {
        return Err(CliError::Config(format!("empty {what} list {s:?}")));
    }
    Ok(items)
}

/// Values read from the flat key-value JSON config file.
#[derive(Debug, Default)]
struct FileConfig {
    theta_start: Option<f64>,
    theta_stop: Option<f64>,
    theta_count: Option<usize>,
    mdr: Option<Vec<MdrId>>,
    seed: Option<u64>,
    restarts: Option<usize>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    suite: Option<Vec<SuiteId>>,
    dims: Option<Vec<usize>>,
    trials: Option<usize>,
    negative_control: Option<bool>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<FileConfig> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
        let Some(map) = value.as_object() else {
            return Err(CliError::Config(format!(
                "config file {} must be a JSON object",
                path.display()
            )));
        };
        let mut fc = FileConfig::default();
        for (key, val) in map {
            match key.as_str() {
                "theta_start" => fc.theta_start = Some(as_f64(key, val)?),
                "theta_stop" => fc.theta_stop = Some(as_f64(key, val)?),
                "theta_count" => fc.theta_count = Some(as_usize(key, val)?),
                "mdr" => fc.mdr = Some(parse_mdr_list(&as_str(key, val)?)?),
                "seed" => fc.seed = Some(as_u64(key, val)?),
                "restarts" => fc.restarts = Some(as_usize(key, val)?),
                "out" => fc.out = Some(PathBuf::from(as_str(key, val)?)),
                "format" => fc.format = Some(OutputFormat::parse(&as_str(key, val)?)?),
                "suite" => fc.suite = Some(parse_suite_list(&as_str(key, val)?)?),
                "dims" => fc.dims = Some(parse_dim_list(&as_str(key, val)?)?),
                "trials" => fc.trials = Some(as_usize(key, val)?),
                "negative_control" => fc.negative_control = Some(as_bool(key, val)?),
                other => {
                    return Err(CliError::Config(format!(
                        "unknown config key {other:?}"
                    )))
                }
            }
        }
        Ok(fc)
    }
}

fn as_f64(key: &str, val: &serde_json::Value) -> Result<f64> {
    val.as_f64()
        .ok_or_else(|| CliError::Config(format!("config key {key:?} must be a number")))
}

fn as_u64(key: &str, val: &serde_json::Value) -> Result<u64> {
    val.as_u64()
        .ok_or_else(|| CliError::Config(format!("config key {key:?} must be a nonnegative integer")))
}

fn as_usize(key: &str, val: &serde_json::Value) -> Result<usize> {
    Ok(as_u64(key, val)? as usize)
}

fn as_str(key: &str, val: &serde_json::Value) -> Result<String> {
    val.as_str()
        .map(str::to_string)
        .ok_or_else(|| CliError::Config(format!("config key {key:?} must be a string")))
}

fn as_bool(key: &str, val: &serde_json::Value) -> Result<bool> {
    val.as_bool()
        .ok_or_else(|| CliError::Config(format!("config key {key:?} must be a boolean")))
}
