//! bhtlab: integrate BHT / Nahm-type matrix flows, run verification suites,
//! and emit spectral-curve reports.
//!
//! Exit codes: 0 success, 1 failed checks, 2 configuration errors,
//! 3 blow-up during integration.

mod checks;
mod io;
mod simulate;
mod spectral_cmd;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bhtlab",
    version,
    about = "Matrix-flow laboratory: BHT flow, Nahm's equations, spectral curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a flow from a seeded random initial state.
    Simulate(simulate::SimulateArgs),
    /// Run residual check suites over seeded random ensembles.
    Check(checks::CheckArgs),
    /// Emit spectral-curve coefficients and a report for a trajectory file.
    Spectral(spectral_cmd::SpectralArgs),
}

/// Seed precedence: --seed flag, then BHTLAB_SEED, then 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("BHTLAB_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("BHTLAB_SEED is not a valid u64: {text:?}")),
        Err(_) => Ok(0),
    }
}

/// Prints a config failure to stderr plus the machine-readable line, and
/// returns exit code 2.
fn config_error(command: &str, message: &str) -> i32 {
    eprintln!("error: {message}");
    println!(
        "{}",
        serde_json::json!({ "command": command, "status": "config-error", "error": message })
    );
    2
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Simulate(args) => simulate::run(args),
        Command::Check(args) => checks::run(args),
        Command::Spectral(args) => spectral_cmd::run(args),
    };
    std::process::exit(code);
}
