//! Experiment command line: code design, simulation campaigns, enrollment
//! and reconstruction on bit files, bound and region tables, and
//! exhaustive leakage audits.
//!
//! Every run is fully determined by the flags plus the master seed, and
//! each output artifact embeds the tool version, the effective
//! configuration, and the seed. `WZKEY_SEED` overrides the master seed.

mod bitfile;
mod commands;

use clap::{Parser, Subcommand};
use std::process::ExitCode;
use wzkey_core::Error;

#[derive(Parser)]
#[command(name = "wzkey", version, about = "Wyner-Ziv coded key agreement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design a nested polar code pair for a key size and error target.
    Design(commands::DesignArgs),
    /// Sweep block-error or distortion curves for a designed code.
    Simulate(commands::SimulateArgs),
    /// Enroll an identifier bit file into a helper bundle and key.
    Enroll(commands::EnrollArgs),
    /// Reconstruct the key from a noisy measurement and a helper bundle.
    Reconstruct(commands::ReconstructArgs),
    /// Sphere-packing and random-coding-union bound tables.
    Bounds(commands::BoundsArgs),
    /// Key-leakage-storage boundary sweeps.
    Region(commands::RegionArgs),
    /// The storage-key comparison table.
    Fig5(commands::Fig5Args),
    /// Exhaustive leakage audit of a random nested linear code.
    Audit(commands::AuditArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design(args) => commands::design(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Enroll(args) => commands::enroll(args),
        Command::Reconstruct(args) => commands::reconstruct(args),
        Command::Bounds(args) => commands::bounds(args),
        Command::Region(args) => commands::region(args),
        Command::Fig5(args) => commands::fig5(args),
        Command::Audit(args) => commands::audit(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Distinct exit codes for the contract-level failures.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Infeasible(_) => 2,
        Error::DigestMismatch => 3,
        Error::DomainError(_) => 4,
        _ => 1,
    }
}
