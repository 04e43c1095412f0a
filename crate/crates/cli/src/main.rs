use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ergodic_jacobi_cli::{run, Command};

/// Lyapunov exponents, density of states, spectra and capacity bounds for
/// ergodic Jacobi operators.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's output_dir, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command, &args.config, args.out.as_deref(), args.seed) {
        Ok(outcome) if outcome.bounds_hold == Some(false) => {
            eprintln!("some bound checks failed");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
