use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use logfan::run::{max_orbits_from_env, run, Command, RunOptions, EXIT_CONFIG};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Subcommand {
    /// Charts and log smoothness verdicts only.
    CheckKato,
    /// Delaunay cells and the cone decomposition only.
    Delaunay,
    /// The full pipeline.
    BuildModel,
    /// Re-render a stored report.
    Report,
}

/// Verifies toric charts, log smoothness, admissibility, polarization and
/// tameness for combinatorial degeneration data.
#[derive(Debug, Parser)]
#[command(name = "logfan", version)]
struct Cli {
    #[arg(value_enum)]
    command: Subcommand,
    /// Job configuration (JSON); for `report`, a stored report.
    #[arg(long)]
    config: PathBuf,
    /// Directory for report.json and dual_complex.dot; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit the dual complex as a DOT graph.
    #[arg(long)]
    dot: bool,
    /// Worker threads for per-orbit work.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Recorded in the report provenance.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let max_orbits = match max_orbits_from_env() {
        Ok(n) => n,
        Err(e) => {
            eprintln!("logfan: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let command = match cli.command {
        Subcommand::CheckKato => Command::CheckKato,
        Subcommand::Delaunay => Command::Delaunay,
        Subcommand::BuildModel => Command::BuildModel,
        Subcommand::Report => Command::Report,
    };
    let opts = RunOptions {
        command,
        config: cli.config,
        out: cli.out,
        dot: cli.dot,
        jobs: cli.jobs.map(|n| n as usize),
        seed: cli.seed,
        max_orbits,
    };
    ExitCode::from(run(&opts) as u8)
}
