use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use gmfg::config::{compare, load_equilibrium, run, Mode, RunConfig};

/// Graphon mean field game solver, learner and n-player checks.
#[derive(Debug, Parser)]
#[command(name = "gmfg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the mode named in a config file and write its result bundle.
    Run {
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Distances between the equilibria of two result bundles.
    Compare { a: PathBuf, b: PathBuf },
    /// Run a config in n-player sweep mode.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &Path, seed: Option<u64>) -> anyhow::Result<RunConfig> {
    let mut config = RunConfig::from_path(path)?;
    if seed.is_some() {
        config.seed = seed;
    }
    Ok(config)
}

fn main_inner(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, seed } => {
            let config = load(&config, seed)?;
            let bundle = run(&config)?;
            if let Some(t) = bundle.toy_check {
                println!("{}", t.line());
                anyhow::ensure!(t.pass, "toy check failed");
            }
            println!("wrote {}", bundle.dir.display());
        }
        Command::Sweep { config, seed } => {
            let mut config = load(&config, seed)?;
            config.mode = Mode::NplayerSweep;
            if config.sweep.is_none() {
                config.sweep = Some(Default::default());
            }
            let bundle = run(&config)?;
            print!("{}", gmfg::nplayer::sweep_csv(bundle.sweep.as_deref().unwrap_or(&[])));
            println!("wrote {}", bundle.dir.display());
        }
        Command::Compare { a, b } => {
            let ea = load_equilibrium(&a)?;
            let eb = load_equilibrium(&b)?;
            let report = compare(&ea, &eb).context("comparing equilibria")?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
