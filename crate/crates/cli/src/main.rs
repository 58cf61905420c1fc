//! `burgers` — command-line entry point for the stochastic Burgers toolkit.
//!
//! Exit codes: 0 success, 1 asserted property failed, 2 usage or
//! configuration error, 3 numerical blow-up.

mod config;
mod output;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};

use burgers_spde::exec::Workers;
use burgers_spde::SimError;
use config::ExperimentSpec;
use output::ResultBundle;

/// Environment variable overriding the configured worker count.
const WORKERS_ENV: &str = "BURGERS_WORKERS";

#[derive(Parser)]
#[command(name = "burgers", version = output::BUILD_VERSION, about = "Spectral Galerkin simulation and Monte Carlo estimation for the 1-D stochastic Burgers equation")]
struct Cli {
    /// Experiment configuration file (TOML). Defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker count override (also via BURGERS_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory (default: out/<experiment>/<subcommand>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate trajectories; optionally dump them as CSV.
    Simulate,
    /// Check the exact OU step and the stochastic-convolution second moment.
    OuCheck,
    /// Decay of sup_t ||z_alpha||_L4 across the alpha grid.
    AlphaScaling,
    /// Estimate log E[exp(lambda G)] for a path functional.
    Expmoment,
    /// Scan lambda with stabilization verdicts.
    LambdaScan,
    /// Variational (control) lower bounds against the exponential moment.
    Variational,
    /// Semigroup gradient: stochastic-integral estimator vs finite difference.
    Gradient,
    /// Lipschitz-regularization probe over a time grid.
    Lipschitz,
    /// Invariant-measure tail fit from one long trajectory.
    Invariant,
    /// Galerkin mode-doubling convergence.
    Convergence,
    /// Fast internal invariant checks.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::OuCheck => "ou-check",
            Command::AlphaScaling => "alpha-scaling",
            Command::Expmoment => "expmoment",
            Command::LambdaScan => "lambda-scan",
            Command::Variational => "variational",
            Command::Gradient => "gradient",
            Command::Lipschitz => "lipschitz",
            Command::Invariant => "invariant",
            Command::Convergence => "convergence",
            Command::Selftest => "selftest",
        }
    }
}

fn load_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let mut spec = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
            ExperimentSpec::from_toml(&text)?
        }
        None => ExperimentSpec::example("adhoc"),
    };
    if let Some(seed) = cli.seed {
        spec.master_seed = seed;
    }
    if let Ok(env_workers) = std::env::var(WORKERS_ENV) {
        spec.workers = env_workers
            .parse()
            .map_err(|_| anyhow::anyhow!("{WORKERS_ENV} must be a positive integer"))?;
    }
    if let Some(w) = cli.workers {
        spec.workers = w;
    }
    if spec.workers == 0 {
        anyhow::bail!("worker count must be at least 1");
    }
    Ok(spec)
}

fn run(cli: &Cli) -> Result<ResultBundle> {
    let spec = load_spec(cli)?;
    let workers = Workers::new(spec.workers);
    let start = Instant::now();
    let (body, tables, ok) = match cli.command {
        Command::Simulate => runner::simulate(&spec, &workers)?,
        Command::OuCheck => runner::ou_check(&spec, &workers)?,
        Command::AlphaScaling => runner::alpha_scaling(&spec, &workers)?,
        Command::Expmoment => runner::expmoment(&spec, &workers)?,
        Command::LambdaScan => runner::lambda_scan_cmd(&spec, &workers)?,
        Command::Variational => runner::variational(&spec, &workers)?,
        Command::Gradient => runner::gradient(&spec, &workers)?,
        Command::Lipschitz => runner::lipschitz(&spec, &workers)?,
        Command::Invariant => runner::invariant(&spec, &workers)?,
        Command::Convergence => runner::convergence(&spec, &workers)?,
        Command::Selftest => runner::selftest(&spec, &workers)?,
    };
    let bundle =
        ResultBundle::new(cli.command.name(), &spec, body, ok, start.elapsed())?.with_tables(tables);
    let out_dir = cli
        .out
        .clone()
        .or_else(|| spec.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&spec.name).join(cli.command.name()));
    let written = bundle.write(&out_dir, &spec)?;
    if !cli.quiet {
        for path in &written {
            eprintln!("wrote {}", path.display());
        }
        eprintln!(
            "{}: {}",
            cli.command.name(),
            if bundle.ok { "ok" } else { "PROPERTY FAILURE" }
        );
    }
    Ok(bundle)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(bundle) => {
            if bundle.ok {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let blow_up = err
                .chain()
                .any(|c| matches!(c.downcast_ref::<SimError>(), Some(SimError::BlowUp { .. })));
            if blow_up {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
