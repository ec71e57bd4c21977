mod artifacts;
mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use artifacts::Artifacts;
use config::{Command, ExperimentConfig};
use error::CliError;

const RNG_NAME: &str = "ChaCha8Rng";
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "nnapprox", version, about = "Approximation-space experiments with growth-constrained ReLU networks")]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Debug, Subcommand)]
enum Action {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Overrides the config's `seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(config: &Path, out_dir: &Path, seed: Option<u64>) -> Result<bool, CliError> {
    let (cfg, hash) = ExperimentConfig::load(config)?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Artifacts::default();
    let outcome = match cfg.command {
        Command::Gamma => commands::gamma(&cfg, &mut out)?,
        Command::Verdict => commands::verdict(&cfg, &mut out)?,
        Command::Counterexample => commands::counterexample(&cfg, &mut rng, &mut out)?,
        Command::LearnerRate => commands::learner_rate(&cfg, &mut out)?,
        Command::LipschitzAudit => commands::audit(&cfg, &mut rng, &mut out)?,
    };
    let report = json!({
        "command": cfg.command,
        "config_sha256": hash,
        "config": cfg,
        "versions": {
            "nnapprox": nnapprox::VERSION,
            "nnapprox-cli": env!("CARGO_PKG_VERSION"),
        },
        "seed": seed,
        "rng": RNG_NAME,
        "check": outcome.check,
        "pass": outcome.pass,
        "files": out.names(),
        "result": outcome.result,
    });
    out.json("report.json", &report)?;
    out.commit(out_dir)?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let Action::Run { config, out_dir, seed } = Cli::parse().action;
    match run(&config, &out_dir, seed) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("nnapprox: check failed; see {}", out_dir.join("report.json").display());
            ExitCode::from(EXIT_CHECK_FAILED)
        }
        Err(e) => {
            eprintln!("nnapprox: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
