use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use losmimo::experiments::{
    emit_csv, run_capacity_point, run_geometry_sweep, run_gram_check, run_optimize,
    run_spacing_sweep, run_xpd_sweep, ExperimentConfig, SweepResult,
};

/// Dual-polarized URA design and capacity sweeps for line-of-sight MIMO links.
#[derive(Parser)]
#[command(name = "losmimo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity versus antenna spacing.
    SpacingSweep(Common),
    /// Array dimensions for every row/column factorization of M.
    GeometrySweep(Common),
    /// Capacity at the optimal spacing versus polarization leakage.
    XpdSweep(Common),
    /// Capacity of a single configured geometry.
    Capacity(Common),
    /// Area- and aperture-length-minimizing factorizations.
    Optimize(Common),
    /// Largest off-diagonal Gram entry at the optimal spacing.
    GramCheck(Common),
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration key, e.g. `--set snr_db=-20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output CSV path; overrides `output` in the config.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (common, runner): (
        &Common,
        fn(&ExperimentConfig) -> losmimo::Result<SweepResult>,
    ) = match &cli.command {
        Command::SpacingSweep(c) => (c, run_spacing_sweep),
        Command::GeometrySweep(c) => (c, run_geometry_sweep),
        Command::XpdSweep(c) => (c, run_xpd_sweep),
        Command::Capacity(c) => (c, run_capacity_point),
        Command::Optimize(c) => (c, run_optimize),
        Command::GramCheck(c) => (c, run_gram_check),
    };
    let mut cfg = ExperimentConfig::from_file(&common.config, &common.overrides)
        .with_context(|| format!("loading {}", common.config.display()))?;
    if let Some(out) = &common.output {
        cfg.output = out.clone();
    }
    let result = runner(&cfg)?;
    if let Command::GramCheck(_) = cli.command {
        if let Some(rel) = result.column_f64("max_offdiag_rel") {
            for (row, rel) in result.rows.iter().zip(rel) {
                eprintln!("{} max off-diagonal / (beta M) = {rel:e}", row[0]);
            }
        }
    }
    emit_csv(&result, &cfg.output)?;
    println!("{}", cfg.output.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
