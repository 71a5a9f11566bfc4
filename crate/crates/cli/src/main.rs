//! `holoww`: run water-wave scenarios, kernel tables and verification suites.
//!
//! Exit codes: 0 ok, 1 i/o, 2 config, 3 numerical, 4 verdict.

mod commands;
mod config;
mod failure;
mod output;

use clap::{Parser, Subcommand};
use failure::Failure;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "holoww", version, about = "Water waves in holomorphic coordinates: simulations, kernel tables, verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set numerics.n=128` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 4 when any verdict fails.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the solver and the configured diagnostics.
    Simulate,
    /// Tabulate the kernel and check its properties.
    Kernel {
        /// Sweep of the diagonal integral as START:STOP:COUNT.
        #[arg(long = "x0-grid")]
        x0_grid: Option<String>,
        /// Depth of the scaled kernel.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Run a verification suite, or `all`.
    Verify { suite: String },
    /// Norms and frequency envelope of the initial data.
    Norms,
}

fn x0_override(arg: &str) -> Result<String, Failure> {
    let parts: Vec<&str> = arg.split(':').collect();
    let bad = || Failure::Config(format!("--x0-grid `{arg}`: expected START:STOP:COUNT"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let c: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(format!("kernel.x0_grid=[{a:?}, {b:?}, {c}]"))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let mut overrides = cli.set.clone();
    if let Command::Kernel { x0_grid, h } = &cli.command {
        if let Some(arg) = x0_grid {
            overrides.push(x0_override(arg)?);
        }
        if let Some(h) = h {
            overrides.push(format!("kernel.h={h:?}"));
        }
    }
    let cfg = config::load(cli.config.as_deref(), &overrides, cli.seed)?;
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    match &cli.command {
        Command::Simulate => commands::simulate(&cfg, &dir, cli.strict),
        Command::Kernel { .. } => commands::kernel(&cfg, &dir, cli.strict),
        Command::Verify { suite } => commands::verify(&cfg, &dir, suite),
        Command::Norms => commands::norms(&cfg, &dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("holoww: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
