use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use gmhd2d_core::app::{self, load_checkpoint, RunConfig, SweepSpec};
use gmhd2d_core::diagnostics::lab::run_verification;
use gmhd2d_core::regime::{classify, region_boundary_table, BoundsRow};

/// Pseudo-spectral solver and diagnostics for 2D MHD with fractional dissipation.
#[derive(Parser)]
#[command(name = "gmhd2d", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Continue from a checkpoint instead of the configured initial data.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Run the configuration over a grid of (alpha, beta) pairs.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        max_parallel: usize,
    },
    /// Classify (alpha, beta) against the known regularity regions.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
    },
    /// Run the spectral property suite and the inequality lab.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
    /// Print the lower bounds on beta for alpha in [0, 1/3] as CSV.
    BoundsTable {
        #[arg(long, default_value_t = 31)]
        resolution: usize,
    },
}

fn cmd_run(config: PathBuf, resume: Option<PathBuf>) -> Result<()> {
    let cfg = RunConfig::load(&config)?;
    let outcome = match resume {
        Some(path) => {
            let (state, params) = load_checkpoint(&path)?;
            if params != cfg.params {
                bail!("checkpoint parameters {params:?} differ from config {:?}", cfg.params);
            }
            app::run_from(state, &cfg)?
        }
        None => app::run(&cfg)?,
    };
    let summary = serde_json::json!({
        "completed": outcome.completed,
        "time": outcome.final_state.time(),
        "steps": outcome.steps,
        "samples": outcome.history.len(),
        "max_X": outcome.max_x(),
        "max_Y": outcome.max_y(),
        "blowup": outcome.blowup.label(),
        "regime": outcome.regime,
    });
    println!("{summary}");
    Ok(())
}

fn cmd_sweep(config: PathBuf, alphas: Vec<f64>, betas: Vec<f64>, max_parallel: usize) -> Result<()> {
    let base = RunConfig::load(&config)?;
    let spec = SweepSpec {
        alpha_values: alphas,
        beta_values: betas,
        base,
        max_parallel,
    };
    let rows = app::sweep(&spec)?;
    print!("{}", app::sweep::summary_csv(&rows, true));
    Ok(())
}

fn cmd_verify(seed: u64, n: usize) -> Result<bool> {
    let outcomes = run_verification(seed, n).context("verification setup failed")?;
    let mut ok = true;
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        ok &= o.passed;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, resume } => cmd_run(config, resume).map(|_| true),
        Command::Sweep { config, alphas, betas, max_parallel } => {
            cmd_sweep(config, alphas, betas, max_parallel).map(|_| true)
        }
        Command::Classify { alpha, beta } => serde_json::to_string(&classify(alpha, beta))
            .map(|s| println!("{s}"))
            .map(|_| true)
            .map_err(Into::into),
        Command::Verify { seed, n } => cmd_verify(seed, n),
        Command::BoundsTable { resolution } => {
            if resolution < 2 {
                Err(anyhow::anyhow!("resolution must be at least 2"))
            } else {
                println!("{}", BoundsRow::CSV_HEADER);
                for row in region_boundary_table(resolution) {
                    println!("{}", row.to_csv_row());
                }
                Ok(true)
            }
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
