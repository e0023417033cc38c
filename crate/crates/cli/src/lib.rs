//! Command-line front end for `resonance-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use clap::{Parser, Subcommand};

pub use config::{CommandFlags, CommonFlags, Format, RunConfig};
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "resonance-recoil",
    version,
    about = "Resonant force, vacuum momentum and directional emission for a dissimilar atom pair"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Force, vacuum momentum and directionality versus x = k_A R
    Scan {
        #[arg(long)]
        xmin: Option<f64>,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// One-photon probability channels at a single separation
    Budget {
        #[arg(long)]
        x: Option<f64>,
    },
    /// Angular interference distribution in the plane of the pair axis and z
    Emission {
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        ntheta: Option<usize>,
        #[arg(long)]
        quad_order: Option<usize>,
    },
    /// Run the invariant checks
    Verify {
        /// Closed-form and quadrature checks only (default)
        #[arg(long)]
        fast: bool,
        /// Also run the plane-wave mode-sum checks
        #[arg(long)]
        oracle: bool,
        /// Seed for randomly sampled pairs and directions
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Species registry operations
    Species {
        #[command(subcommand)]
        action: SpeciesAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpeciesAction {
    /// List the species in the registry
    List,
}

impl Command {
    fn flags(&self) -> CommandFlags {
        match *self {
            Command::Scan {
                xmin,
                xmax,
                samples,
            } => CommandFlags {
                xmin,
                xmax,
                samples,
                ..Default::default()
            },
            Command::Budget { x } => CommandFlags {
                x,
                ..Default::default()
            },
            Command::Emission {
                x,
                ntheta,
                quad_order,
            } => CommandFlags {
                x,
                ntheta,
                quad_order,
                ..Default::default()
            },
            Command::Verify { seed, .. } => CommandFlags {
                seed,
                ..Default::default()
            },
            Command::Species { .. } => CommandFlags::default(),
        }
    }
}

/// Runs a parsed invocation.
pub fn run(cli: &Cli) -> CliResult<()> {
    let config = RunConfig::resolve(&cli.common, &cli.command.flags())?;
    match &cli.command {
        Command::Scan { .. } => commands::scan(&config),
        Command::Budget { .. } => commands::budget(&config),
        Command::Emission { .. } => commands::emission(&config),
        Command::Verify { oracle, .. } => commands::verify(&config, *oracle),
        Command::Species {
            action: SpeciesAction::List,
        } => commands::species_list(&config),
    }
}
