//! `kiu`: experiments on Markov additive processes and their self-similar
//! images.
//!
//! Exit status: 0 success, 2 configuration or usage error, 3 simulation or
//! output error, 4 checks ran but failed.

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Context;
use config::ExperimentConfig;
use error::CliError;

const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "kiu", version, about = "Markov additive processes, Lamperti-Kiu paths and entrance laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Use a built-in spec instead of the configured one.
    #[arg(long)]
    fixture: Option<String>,
    /// Master seed; takes precedence over KIU_SEED and the config file.
    #[arg(long, env = "KIU_SEED")]
    seed: Option<u64>,
    /// Output directory; overrides `output` in the config.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate self-similar paths from a fixed start.
    Simulate(Common),
    /// Decide whether the stationary overshoot exists.
    CheckCondition(Common),
    /// Overshoot laws over increasing levels.
    Overshoot(Common),
    /// Ladder, splitting, harmonic, conditioning and occupation checks.
    FluctuationVerify(Common),
    /// Sample paths issued from the origin, with diagnostics.
    Entrance(Common),
    /// Run the acceptance criteria.
    VerifyAll {
        #[command(flatten)]
        common: Common,
        /// Multiplier on every sample size.
        #[arg(long)]
        scale: Option<f64>,
        /// Comma-separated subset, e.g. `1,5,12`.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
    /// Index CSV outputs of a previous run and emit a plotting script.
    Report {
        /// Directory holding the CSV files.
        #[arg(long)]
        from: PathBuf,
        /// Where manifest.csv and plot.py go; defaults to `--from`.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn context(common: &Common, needs_spec: bool) -> Result<Context, CliError> {
    let (config, origin) = match &common.config {
        Some(p) => (ExperimentConfig::load(p)?, p.display().to_string()),
        None => (ExperimentConfig::default(), "<defaults>".to_string()),
    };
    let spec = if needs_spec {
        Some(config.resolve_spec(common.fixture.as_deref(), &origin)?)
    } else {
        None
    };
    Ok(Context {
        seed: common.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        output: common.out.clone().unwrap_or_else(|| config.output.clone()),
        config,
        spec,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(c) => commands::simulate(&context(&c, true)?),
        Command::CheckCondition(c) => commands::check_condition(&context(&c, true)?),
        Command::Overshoot(c) => commands::overshoot(&context(&c, true)?),
        Command::FluctuationVerify(c) => commands::fluctuation_verify(&context(&c, true)?),
        Command::Entrance(c) => commands::entrance(&context(&c, true)?),
        Command::VerifyAll { common, scale, criteria } => {
            let mut ctx = context(&common, false)?;
            if let Some(s) = scale {
                if !(s > 0.0) {
                    return Err(CliError::config("--scale", "must be positive"));
                }
                ctx.config.verify.scale = s;
            }
            if !criteria.is_empty() {
                if let Some(bad) = criteria.iter().find(|c| !(1..=15).contains(*c)) {
                    return Err(CliError::config("--criteria", format!("{bad} is not within 1..=15")));
                }
                ctx.config.verify.criteria = criteria;
            }
            commands::verify_all(&ctx)
        }
        Command::Report { from, out } => {
            let out = out.unwrap_or_else(|| from.clone());
            commands::report(&from, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kiu: {e}");
            ExitCode::from(e.code())
        }
    }
}
