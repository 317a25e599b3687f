//! `predict`: run experiments, size samples, and audit privacy from the shell.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use predict_core::harness::{
    plan_halfspace, plan_oblivious, run_audit, run_experiment, AuditConfig, Constants, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "predict", version, about = "Private prediction over adversarial query streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlanMode {
    Oblivious,
    Halfspace,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and write per-run reports plus an aggregate CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        /// Master seed; overrides both the config and PREDICT_SEED.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the sample-size plan as JSON.
    Plan {
        #[arg(long, value_enum)]
        mode: PlanMode,
        #[arg(long)]
        d: usize,
        #[arg(long = "T")]
        rounds: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Audit the predictor and a broken variant on a toy instance.
    Audit {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether every configured gate passed.
fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run { config, trials, seed, workers, out } => {
            let mut cfg = ExperimentConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            cfg.apply_seed_env()?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            cfg.validate()?;
            let summary = run_experiment(&cfg)?;
            println!("{}", summary.dir.join("aggregate.csv").display());
            if let Some(f) = summary.gate_fraction {
                eprintln!("gate fraction {f:.4}: {}", if summary.gate_passed { "pass" } else { "FAIL" });
            }
            Ok(summary.gate_passed)
        }
        Command::Plan { mode, d, rounds, alpha, beta, eps, delta } => {
            let c = Constants::default();
            let plan = match mode {
                PlanMode::Oblivious => plan_oblivious(d, rounds, alpha, beta, eps, delta, &c)?,
                PlanMode::Halfspace => plan_halfspace(d, rounds, alpha, beta, eps, delta, &c)?,
            };
            println!("{}", serde_json::to_string_pretty(&plan)?);
            Ok(true)
        }
        Command::Audit { config } => {
            let cfg = AuditConfig::load(&config).with_context(|| format!("loading {}", config.display()))?;
            let outcome = run_audit(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&outcome)?);
            Ok(outcome.honest_within_budget && outcome.broken_flagged)
        }
    }
}
