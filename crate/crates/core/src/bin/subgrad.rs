use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use subgrad::experiment::{
    cmd_avoidance, cmd_flow, cmd_ripcheck, cmd_run, ExperimentConfig, EXIT_OK,
};
use subgrad::Result;

#[derive(Parser)]
#[command(
    name = "subgrad",
    version,
    about = "Subgradient method and subgradient flow experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the subgradient method; writes run.csv and convergence.json.
    Run(Common),
    /// Classify terminal points of many random runs; writes avoidance.json.
    Avoidance(Common),
    /// Integrate the subgradient flow; writes flow.csv and flow_report.json.
    Flow(Common),
    /// Certify the lower isometry constant of a sensing instance; writes rip.json.
    Ripcheck(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (an instance file for `ripcheck`).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn load(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn print_json(path: &Path) {
    if let Ok(text) = std::fs::read_to_string(path) {
        print!("{text}");
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run(c) => {
            let outcome = cmd_run(&load(&c)?, &c.out)?;
            print_json(&c.out.join("convergence.json"));
            Ok(outcome.exit_code)
        }
        Command::Avoidance(c) => {
            let s = cmd_avoidance(&load(&c)?, &c.out)?;
            println!(
                "trials {} plus_u {} minus_u {} A {} unresolved {}",
                s.trials,
                s.converged_to_plus_u,
                s.converged_to_minus_u,
                s.converged_to_a,
                s.unresolved
            );
            Ok(EXIT_OK)
        }
        Command::Flow(c) => {
            cmd_flow(&load(&c)?, &c.out)?;
            print_json(&c.out.join("flow_report.json"));
            Ok(EXIT_OK)
        }
        Command::Ripcheck(c) => {
            cmd_ripcheck(&c.config, &c.out)?;
            print_json(&c.out.join("rip.json"));
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
