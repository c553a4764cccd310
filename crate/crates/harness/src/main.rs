use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emlab_harness::{run_experiment, Experiment, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "emlab", version, about = "Euler-Maxwell dispersive laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve random small data and record norms, residuals and snapshots.
    Simulate(Common),
    /// Fit decay exponents of the linear Klein-Gordon flow.
    LinearDecay(Common),
    /// Locate space-time resonances and report outcome/germ radii.
    Resonances(Common),
    /// Check the high-frequency phase lower bound.
    PhaseBound(Common),
    /// Resonance summaries over a list of sound speeds.
    CsSweep(Common),
    /// Cauchy test on profiles along a nonlinear run.
    Scattering(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set integrator.dt=0.05`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn load(experiment: Experiment, common: &Common) -> Result<ExperimentConfig, HarnessError> {
    match &common.config {
        Some(path) => ExperimentConfig::load(path, &common.overrides, Some(experiment)),
        None => ExperimentConfig::for_experiment("", &common.overrides, experiment),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (experiment, common) = match &cli.command {
        Command::Simulate(c) => (Experiment::Simulate, c),
        Command::LinearDecay(c) => (Experiment::LinearDecay, c),
        Command::Resonances(c) => (Experiment::Resonances, c),
        Command::PhaseBound(c) => (Experiment::PhaseBound, c),
        Command::CsSweep(c) => (Experiment::CsSweep, c),
        Command::Scattering(c) => (Experiment::Scattering, c),
    };
    match load(experiment, common).and_then(|cfg| run_experiment(&cfg)) {
        Ok(report) => {
            println!("{}", report.output_dir.join("manifest.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
