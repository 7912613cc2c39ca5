//! Batch experiment runner: every module of the laboratory behind one
//! subcommand with a JSON config, reproducible outputs, and a machine-
//! readable exit-code taxonomy.
//!
//! Exit codes: 0 success, 2 schema violation, 3 budget exhaustion,
//! 4 falsification (a measurement contradicting a verified identity),
//! 5 precision failure or undecided certificate.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nilmix::Error;

#[derive(Parser)]
#[command(name = "nilmix", about = "verification laboratory for commuting nilmanifold automorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, clap::Args)]
struct RunArgs {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker cap; does not affect results.
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the working precision in bits.
    #[arg(long)]
    precision: Option<usize>,
    /// Override the random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Characters and Galois orbits of an action.
    Spectrum(RunArgs),
    /// Total-ergodicity certificate or exact counterexample.
    Ergodic(RunArgs),
    /// Anosov decision for one word of the action.
    Anosov(RunArgs),
    /// Certified growth constant of the Lyapunov functional.
    LyapunovConstant(RunArgs),
    /// Absolute height of an algebraic number.
    Height(RunArgs),
    /// Lower-bound chain, both bound routes, and the measured gap.
    Waldschmidt(RunArgs),
    /// Brute-force S-unit inequality search.
    SunitSearch(RunArgs),
    /// Exact multi-correlation sweep on the torus.
    MixExact(RunArgs),
    /// Monte-Carlo correlation on the Heisenberg nilmanifold.
    MixMc(RunArgs),
    /// Shape iteration: separation power law and decay fit.
    Shape(RunArgs),
    /// Box-map dichotomy: obstruction search and equidistribution test.
    BoxmapCheck(RunArgs),
    /// Cocycle validation and the rigidity pipeline.
    Cocycle(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Ergodic(_) => "ergodic",
            Command::Anosov(_) => "anosov",
            Command::LyapunovConstant(_) => "lyapunov-constant",
            Command::Height(_) => "height",
            Command::Waldschmidt(_) => "waldschmidt",
            Command::SunitSearch(_) => "sunit-search",
            Command::MixExact(_) => "mix-exact",
            Command::MixMc(_) => "mix-mc",
            Command::Shape(_) => "shape",
            Command::BoxmapCheck(_) => "boxmap-check",
            Command::Cocycle(_) => "cocycle",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Spectrum(a)
            | Command::Ergodic(a)
            | Command::Anosov(a)
            | Command::LyapunovConstant(a)
            | Command::Height(a)
            | Command::Waldschmidt(a)
            | Command::SunitSearch(a)
            | Command::MixExact(a)
            | Command::MixMc(a)
            | Command::Shape(a)
            | Command::BoxmapCheck(a)
            | Command::Cocycle(a) => a,
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::Degenerate(_) => 2,
        Error::Budget(_) => 3,
        Error::Falsification(_) => 4,
        Error::Precision(_) | Error::Undecided(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = cli.command.args().clone();
    if let Some(jobs) = args.jobs {
        // worker cap only; all accumulation is order-canonicalized
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match commands::run(cli.command.name(), &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nilmix: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}
