// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use open_rabi_cli::config::{SweepMode, SweepParam, SweepSpec};
use open_rabi_cli::figs::{fig_points, Fig1Row, Fig2Row};
use open_rabi_cli::output::emit;
use open_rabi_cli::runs::{rate_point, steady_point, trajectory};
use open_rabi_cli::sweep::{run_sweep, worker_pool, SweepRows};
use open_rabi_cli::tables::table_rows;
use open_rabi_cli::{CliError, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "open-rabi", version, about = "Open Rabi model: photon generation from vacuum under dephasing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set params.g=0.03`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Worker threads for sweeps and tables.
    #[arg(long, env = "OPEN_RABI_WORKERS", global = true)]
    jobs: Option<usize>,
    /// Report lower-bound violations without a failing exit code.
    #[arg(long, global = true)]
    warn_only: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Asymptotic photon rate of a pure-dephasing run.
    Rate,
    /// Steady state beside the closed-form stationary values and bounds.
    Steady,
    /// Observable trace of a single run.
    Evolve,
    /// Recompute a reference table (1 or 2).
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        /// Use the dephasing rates as listed in the reference tables instead of the effective ones.
        #[arg(long)]
        as_printed: bool,
    },
    /// Sweep data for figure 1 (ζ_a, α_a) or figure 2 (rates).
    Fig {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
    /// One-parameter sweep; falls back to the `[sweep]` config section.
    Sweep {
        #[arg(long, value_enum)]
        param: Option<SweepParam>,
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long, value_enum)]
        mode: Option<SweepMode>,
    },
}

fn writer(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.output.path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_rows<T: Serialize>(cfg: &RunConfig, rows: &[T]) -> Result<(), CliError> {
    let mut out = writer(cfg)?;
    emit(rows, cfg.output.format, &mut out)?;
    out.flush()?;
    Ok(())
}

fn check_bounds(cfg: &RunConfig, violations: usize) -> Result<(), CliError> {
    if violations == 0 {
        return Ok(());
    }
    if cfg.warn_only {
        log::warn!("{violations} row(s) violate a lower bound");
        return Ok(());
    }
    Err(CliError::BoundViolation { count: violations })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(out) = cli.out {
        cfg.output.path = Some(out);
    }
    if let Some(format) = cli.format {
        cfg.output.format = format;
    }
    cfg.warn_only |= cli.warn_only;

    match cli.command {
        Command::Rate => {
            let row = rate_point(&cfg)?;
            log::info!("slope {:.4e}, closed form {:.4e}", row.slope, row.analytic_rate);
            write_rows(&cfg, &[row])
        }
        Command::Steady => {
            let row = steady_point(&cfg)?;
            write_rows(&cfg, std::slice::from_ref(&row))?;
            check_bounds(&cfg, row.violates_lower_bound() as usize)
        }
        Command::Evolve => write_rows(&cfg, &trajectory(&cfg)?),
        Command::Table { which, as_printed } => {
            let pool = worker_pool(cli.jobs)?;
            let rows = table_rows(which, as_printed, &cfg, &pool)?;
            write_rows(&cfg, &rows)?;
            check_bounds(&cfg, rows.iter().filter(|r| r.steady.violates_lower_bound()).count())
        }
        Command::Fig { which } => {
            let pool = worker_pool(cli.jobs)?;
            let points = fig_points(&cfg, &pool)?;
            if which == 1 {
                write_rows(&cfg, &points.iter().map(Fig1Row::from).collect::<Vec<_>>())
            } else {
                write_rows(&cfg, &points.iter().map(Fig2Row::from).collect::<Vec<_>>())
            }
        }
        Command::Sweep { param, values, mode } => {
            let mut spec = cfg.sweep.clone();
            if let Some(param) = param {
                spec = Some(SweepSpec { param, values, mode: mode.unwrap_or_default() });
            } else if let (Some(s), Some(m)) = (spec.as_mut(), mode) {
                s.mode = m;
            }
            let spec = spec.ok_or_else(|| {
                CliError::Config("sweep needs --param/--values or a [sweep] section".into())
            })?;
            if spec.values.is_empty() {
                return Err(CliError::Config("sweep has no values".into()));
            }
            let pool = worker_pool(cli.jobs)?;
            match run_sweep(&cfg, &spec, &pool)? {
                SweepRows::Steady(rows) => {
                    write_rows(&cfg, &rows)?;
                    check_bounds(&cfg, rows.iter().filter(|r| r.violates_lower_bound()).count())
                }
                SweepRows::Rate(rows) => write_rows(&cfg, &rows),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = e.guidance() {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
