//! Operator entry point: vehicle-motion observer design, simulation, and
//! evaluation.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use ycoo::cli::{
    cmd_compare, cmd_compare_single, cmd_design, cmd_robustness, cmd_simulate, RunConfig,
};
use ycoo::error::YcooError;
use ycoo::sim::NoiseMode;

#[derive(Parser)]
#[command(
    name = "ycoo",
    about = "Vehicle motion tracking: observer-bank design, simulation, and evaluation",
    version
)]
struct Cli {
    /// Configuration file (TOML); flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "YCOO_OUT")]
    out: Option<PathBuf>,
    /// Base RNG seed.
    #[arg(long, global = true, env = "YCOO_SEED")]
    seed: Option<u64>,
    /// Number of Monte-Carlo runs.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Observer selection: ycoo, luenberger, or both.
    #[arg(long, global = true)]
    observer: Option<String>,
    /// Scenario name (straight, lane_change, double_lane_change,
    /// cross_traffic, left_turn).
    #[arg(long, global = true)]
    scenario: Option<String>,
    /// Noise interpretation: per-sample variance or PSD height.
    #[arg(long, global = true, value_parser = parse_noise_mode)]
    noise_mode: Option<NoiseMode>,
    /// Emit SVG plots alongside CSV traces.
    #[arg(long, global = true)]
    plots: bool,
    #[command(subcommand)]
    command: Command,
}

fn parse_noise_mode(s: &str) -> Result<NoiseMode, String> {
    match s {
        "per-sample" => Ok(NoiseMode::PerSample),
        "psd" => Ok(NoiseMode::Psd),
        other => Err(format!("unknown noise mode '{other}' (per-sample|psd)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate the frozen design data and emit design matrices +
    /// frequency responses.
    Design {
        /// Operating-point id (1..=3); all three when omitted.
        id: Option<u32>,
    },
    /// Run one closed-loop simulation and emit the trace CSV.
    Simulate,
    /// Monte-Carlo comparison of both observers across scenarios.
    Compare,
    /// Noise-free wheelbase-mismatch sweep.
    Robustness,
}

fn resolve(cli: &Cli) -> Result<RunConfig, YcooError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(runs) = cli.runs {
        cfg.runs = runs;
    }
    if let Some(observer) = &cli.observer {
        cfg.observer = observer.clone();
    }
    if let Some(scenario) = &cli.scenario {
        cfg.scenario = Some(scenario.clone());
    }
    if let Some(mode) = cli.noise_mode {
        cfg.noise_mode = mode;
    }
    if cli.plots {
        cfg.plots = true;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), YcooError> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Design { id } => cmd_design(&cfg, *id),
        Command::Simulate => cmd_simulate(&cfg),
        Command::Compare => match cfg.observers()?.as_slice() {
            [one] => cmd_compare_single(&cfg, *one),
            _ => cmd_compare(&cfg),
        },
        Command::Robustness => cmd_robustness(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                YcooError::InvalidConfig { .. } | YcooError::UnknownScenario { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}
