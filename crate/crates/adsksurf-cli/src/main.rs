//! Command-line front end: generate members of the explicit landslide
//! family, build and verify reconstructed surfaces, evaluate curvature from
//! sampled data, and estimate cross-ratio norms of boundary maps.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid arguments or
//! malformed input files, 3 numerical failure.

mod cmd_barrier;
mod cmd_curvature;
mod cmd_qsnorm;
mod cmd_verify;
mod io;

use clap::{Parser, Subcommand};

pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "adsksurf",
    about = "Constant-curvature surfaces in anti-de Sitter 3-space from landslide maps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate one member of the landslide family, build its surface and
    /// write profile.json, patch.csv and affine.csv.
    Barrier(cmd_barrier::BarrierArgs),
    /// Run the full invariant suite and emit a machine-readable report.
    Verify(cmd_verify::VerifyArgs),
    /// Per-node Gauss curvature of a sampled surface (intrinsic model) or
    /// of an affine-chart graph (Monge-Ampere formula).
    Curvature(cmd_curvature::CurvatureArgs),
    /// Lower bound of the cross-ratio norm of a boundary circle map.
    Qsnorm(cmd_qsnorm::QsnormArgs),
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ADSKSURF_LOG", "error"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Barrier(args) => cmd_barrier::run(&args),
        Command::Verify(args) => cmd_verify::run(&args),
        Command::Curvature(args) => cmd_curvature::run(&args),
        Command::Qsnorm(args) => cmd_qsnorm::run(&args),
    };
    std::process::exit(code);
}
