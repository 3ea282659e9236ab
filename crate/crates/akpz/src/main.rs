use std::path::PathBuf;
use std::process::ExitCode;

use akpz::{execute, rerun, CliError, Command, Doc};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "akpz", version, about = "Lozenge growth simulator and Hamilton-Jacobi toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Sub,
    /// Worker threads for fanned-out tasks (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(clap::Args)]
struct Run {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Run the growth dynamics from a profile or a stored configuration.
    Simulate(Run),
    /// Sample a stationary tiling on the torus; optionally estimate the drift.
    Gibbs(Run),
    /// Solve the Hamilton-Jacobi equation (characteristics, hopf, riemann, envelope).
    Pde(Run),
    /// Hydrodynamic-limit experiment or aggregation of an existing table.
    Hydro(Run),
    /// Write an SVG lozenge picture of a configuration or profile.
    Snapshot(Run),
    /// Replay a run manifest.
    Rerun {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<akpz::Outcome, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Resource(e.to_string()))?;
    }
    let (cmd, args) = match cli.cmd {
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Gibbs(a) => (Command::Gibbs, a),
        Sub::Pde(a) => (Command::Pde, a),
        Sub::Hydro(a) => (Command::Hydro, a),
        Sub::Snapshot(a) => (Command::Snapshot, a),
        Sub::Rerun { manifest, out } => return rerun(&manifest, &out),
    };
    execute(cmd, Doc::read(&args.config)?, args.seed, &args.out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) => {
            println!("{}", o.report.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("akpz: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
