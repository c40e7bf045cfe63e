//! `vsheet`: command-line front end for the vortex-sheet stability analysis.

mod commands;
mod config;
mod error;
mod output;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "vsheet",
    version,
    about = "Linear stability of the 2D compressible vortex sheet",
    after_help = "Precedence: flags > VSHEET_OUT_DIR (output dir only) > config file > defaults.\n\
Exit codes: 0 success, 1 invalid input, 2 computation or I/O failure, 3 invariant check failed."
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Sweep the Mach number and tabulate the root atlas.
    StabilityMap,
    /// Root atlas, Cartesian root data and coefficient bounds of one state.
    Roots,
    /// Growing normal mode and its residuals (JSON).
    Mode,
    /// Band-limited norm tables and blow-up thresholds.
    Illposed,
    /// Time-domain run of one Fourier mode and its growth-rate fit.
    Evolve,
    /// Run the invariant suite; prints PASS/FAIL lines and writes no files.
    Verify,
}

fn dispatch(command: Command, config: &RunConfig) -> Result<(), CliError> {
    let written = match command {
        Command::StabilityMap => commands::stability_map(config)?,
        Command::Roots => commands::roots(config)?,
        Command::Mode => commands::mode(config)?,
        Command::Illposed => commands::illposed(config)?,
        Command::Evolve => commands::evolve(config)?,
        Command::Verify => return verify::run(config),
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = RunConfig::resolve(&cli.overrides).and_then(|config| dispatch(cli.command, &config));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
