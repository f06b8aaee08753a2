// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmapsim_cli::{execute, CliResult, Experiment, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(
    name = "qmapsim",
    version,
    about = "Simulate general qubit dynamical maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward thermal evolution and recovery of the initial states.
    Recover(Flags),
    /// Population dynamics under the signed-rate generator.
    Timelocal(Flags),
    /// Decompose one map into signed extremal branches and circuits.
    Decompose(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON experiment configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    t_star: Option<f64>,
    #[arg(long)]
    t_prime: Option<f64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u64>,
    /// Skip sampling; only exact columns are filled.
    #[arg(long)]
    exact_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(experiment: Experiment, flags: Flags) -> CliResult<()> {
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment = Some(experiment);
    Overrides {
        t_star: flags.t_star,
        t_prime: flags.t_prime,
        shots: flags.shots,
        seed: flags.seed,
        runs: flags.runs,
        exact_only: flags.exact_only,
        out: flags.out,
    }
    .apply(&mut cfg);
    let outcome = execute(&cfg)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, flags) = match cli.command {
        Command::Recover(f) => (Experiment::Recover, f),
        Command::Timelocal(f) => (Experiment::Timelocal, f),
        Command::Decompose(f) => (Experiment::Decompose, f),
    };
    match run(experiment, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmapsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
