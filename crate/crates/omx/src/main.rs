//! `omx` — model, fit and calibrate piezo-optomechanical transducers.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "omx",
    about = "Modeling and data-reduction toolkit for piezo-optomechanical microwave-optical transducers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward-model sweeps: efficiencies, S-parameters, figures of merit
    Model(RunArgs),
    /// Acousto-optic modulation: spectra, drives, V_pi, gamma_mu
    Aom(RunArgs),
    /// Quantum bit-cost sweep over kappa/omega_m
    Bitcost(RunArgs),
    /// Parameter extraction from traces
    Fit(RunArgs),
    /// Measurement-chain calibration arithmetic
    Calibrate(RunArgs),
    /// Figure-of-merit table regeneration
    Table(RunArgs),
    /// Synthetic trace generation
    Synth(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the config's RNG seed
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Model(a) => ("model", a),
        Command::Aom(a) => ("aom", a),
        Command::Bitcost(a) => ("bitcost", a),
        Command::Fit(a) => ("fit", a),
        Command::Calibrate(a) => ("calibrate", a),
        Command::Table(a) => ("table", a),
        Command::Synth(a) => ("synth", a),
    };
    match omx::cli::run(name, &args.config, &args.out, args.seed) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
