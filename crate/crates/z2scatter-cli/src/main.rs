//! Configuration-driven experiment runner.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when a resource
//! guard (sector-dimension limit) trips, 1 otherwise.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use z2scatter::Error;
use z2scatter_cli::commands;
use z2scatter_cli::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "z2scatter",
    about = "Meson wave-packet scattering toolkit for a (1+1)D Z2 lattice gauge theory",
    version
)]
struct Cli {
    /// Configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configuration seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the configured shot count.
    #[arg(long, global = true)]
    shots: Option<u64>,

    /// Override the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the vacuum angles and the meson-creation parameters.
    Vqe,
    /// Prepare the initial state and report its observables.
    Prepare,
    /// Trotter-evolve the prepared state and record time series.
    Evolve,
    /// Hadamard-test return probability over time.
    ReturnProb,
    /// Exact-diagonalization dump (energies and momentum labels).
    Oracle {
        /// Number of eigenstates to report.
        #[arg(long, default_value_t = 12)]
        n_states: usize,
    },
    /// Noisy twirled evolution with decoherence renormalization.
    TwirlOdr {
        /// Number of independently twirled circuit variants.
        #[arg(long, default_value_t = 10)]
        n_twirls: usize,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(shots) = cli.shots {
        config.shots = shots;
    }
    if let Some(out) = &cli.out {
        config.output.dir = out.display().to_string();
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let config = load_config(cli)?;
    let outputs = match &cli.command {
        Command::Vqe => commands::cmd_vqe(&config)?,
        Command::Prepare => commands::cmd_prepare(&config)?,
        Command::Evolve => commands::cmd_evolve(&config)?,
        Command::ReturnProb => commands::cmd_return_prob(&config)?,
        Command::Oracle { n_states } => commands::cmd_oracle(&config, *n_states)?,
        Command::TwirlOdr { n_twirls } => commands::cmd_twirl_odr(&config, *n_twirls)?,
    };
    let written = outputs.flush(std::path::Path::new(&config.output.dir))?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::InvalidLattice(_) | Error::MissingParameter { .. } => {
                    ExitCode::from(2)
                }
                Error::DimensionExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
