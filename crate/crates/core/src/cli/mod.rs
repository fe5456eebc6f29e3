//! The `netshare` command-line front end.
//!
//! Every run writes its CSV (to `--out` or stdout) and a [`RunManifest`]
//! (next to the CSV as `<out>.manifest.json`, or on stderr). `replay` re-runs
//! a manifest and reproduces the CSV byte for byte.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use commands::{execute, CommandSpec, Outputs};
pub use config::RunConfig;

use crate::rate::Setup;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "netshare", version, about = "Average rates of two-operator cellular networks with and without sharing")]
pub struct Cli {
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = "NETSHARE_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// CSV destination; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Analytic per-operator and aggregate rates.
    Analyze { config: PathBuf },
    /// Monte Carlo estimates next to the analytic values.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Density maximizing one aggregate rate.
    Optimize {
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Sharing)]
        objective: ObjectiveArg,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Optimized aggregate rates over a grid of bandwidth and power ratios.
    Table {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.2,1,5")]
        w_ratios: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.2,1,5")]
        p_ratios: Vec<f64>,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Re-run a recorded manifest.
    Replay { manifest: PathBuf },
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Density search range `min,max` in BS per km².
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub lambda_range: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Nonsharing,
    Sharing,
}

impl From<ObjectiveArg> for Setup {
    fn from(arg: ObjectiveArg) -> Self {
        match arg {
            ObjectiveArg::Nonsharing => Setup::NonSharing,
            ObjectiveArg::Sharing => Setup::Sharing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub timestamp: String,
    pub seed: Option<u64>,
    pub command: CommandSpec,
    /// Configuration after command-line overrides.
    pub config: RunConfig,
}

impl RunManifest {
    pub fn new(command: CommandSpec, config: RunConfig) -> Self {
        let seed = match command {
            CommandSpec::Simulate => Some(config.simulation.seed),
            _ => None,
        };
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            seed,
            command,
            config,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn apply_range(config: &mut RunConfig, range: &RangeArgs) -> Result<(), CliError> {
    if let Some(values) = &range.lambda_range {
        let [lo, hi] = values[..] else {
            return Err(CliError::Config(format!(
                "--lambda-range expects min,max; got {} values",
                values.len()
            )));
        };
        config.search.lambda_min_per_km2 = lo;
        config.search.lambda_max_per_km2 = hi;
    }
    Ok(())
}

/// Resolves the command line into a configuration and command.
pub fn resolve(command: &CliCommand) -> Result<(RunConfig, CommandSpec), CliError> {
    Ok(match command {
        CliCommand::Analyze { config } => (RunConfig::load(config)?, CommandSpec::Analyze),
        CliCommand::Simulate {
            config,
            realizations,
            seed,
        } => {
            let mut cfg = RunConfig::load(config)?;
            if let Some(n) = realizations {
                cfg.simulation.realizations = *n;
            }
            if let Some(s) = seed {
                cfg.simulation.seed = *s;
            }
            (cfg, CommandSpec::Simulate)
        }
        CliCommand::Optimize {
            config,
            objective,
            range,
        } => {
            let mut cfg = RunConfig::load(config)?;
            apply_range(&mut cfg, range)?;
            (cfg, CommandSpec::Optimize { objective: (*objective).into() })
        }
        CliCommand::Table {
            config,
            w_ratios,
            p_ratios,
            range,
        } => {
            let mut cfg = RunConfig::load(config)?;
            apply_range(&mut cfg, range)?;
            (
                cfg,
                CommandSpec::Table {
                    w_ratios: w_ratios.clone(),
                    p_ratios: p_ratios.clone(),
                },
            )
        }
        CliCommand::Replay { manifest } => {
            let m = RunManifest::load(manifest)?;
            (m.config, m.command)
        }
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (config, spec) = resolve(&cli.command)?;
    // A second call fails once the global pool exists; the first one wins.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global();
    let outputs = execute(&config, &spec)?;
    let manifest = RunManifest::new(spec, config);
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Io(format!("manifest: {e}")))?;
    match &cli.out {
        Some(path) => {
            write_file(path, &outputs.csv)?;
            write_file(&manifest_path(path), &manifest_json)?;
            print!("{}", outputs.text);
        }
        None => {
            print!("{}", outputs.csv);
            eprint!("{}", outputs.text);
            eprintln!("{manifest_json}");
        }
    }
    Ok(())
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("netshare: {e}");
            e.exit_code()
        }
    }
}
