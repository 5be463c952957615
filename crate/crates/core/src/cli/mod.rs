//! Command-line scenario runner.
//!
//! Exit status is 0 on success, 2 for configuration errors and 3 for
//! numerical or output failures.

pub mod config;
pub mod output;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use config::{emit_config, parse_config, ConfigError, Format, ScenarioConfig};
use run::{run_scenario, Command, RunError};

#[derive(Debug, Parser)]
#[command(name = "kerrsim", version, about = "Driven Kerr oscillator scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overrides `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Integrator tolerance, overrides `numerics.tol`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Fock truncation, overrides `numerics.n_trunc`.
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// Reads the scenario file and applies the command-line overrides. The
/// result is re-validated through a round trip.
pub fn load_config(cli: &Cli) -> Result<ScenarioConfig, RunError> {
    let path = cli.config.as_ref().ok_or_else(|| {
        RunError::config(
            "config",
            ConfigError::Parse("--config <path> is required".into()),
        )
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| {
        RunError::config(
            "config",
            ConfigError::Parse(format!("{}: {e}", path.display())),
        )
    })?;
    let mut cfg = parse_config(&text).map_err(|e| RunError::config("config", e))?;
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.to_string_lossy().into_owned();
    }
    if let Some(tol) = cli.tol {
        cfg.numerics.tol = tol;
    }
    if let Some(n) = cli.trunc {
        cfg.numerics.n_trunc = Some(n);
    }
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    parse_config(&emit_config(&cfg)).map_err(|e| RunError::config("overrides", e))
}

/// Parses `args`, runs the subcommand and returns the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = load_config(&cli).and_then(|cfg| run_scenario(&cfg, cli.command));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
