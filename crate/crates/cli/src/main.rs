mod commands;
mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::Status;
use config::{CommonArgs, ConfigError, RunConfig};
use output::OutputDir;

/// Monotonicity quantities of ancient mean curvature flows.
#[derive(Debug, Parser)]
#[command(name = "mcf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Huisken's integral at the times `--t` about the origin
    Huisken(CommonArgs),
    /// Ecker's heat-ball ratio A(E_r)/r^n at the radii `--r`
    Ecker(CommonArgs),
    /// Entropy of the slices at the times `--t`
    Entropy(CommonArgs),
    /// Gaussian density at (0, t0) for each `--t` (default t0 = 0)
    Density(CommonArgs),
    /// Compares the Ecker and Huisken limits along the `--r` and `--t` schedules
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Also compare with the supremum of the entropy
        #[arg(long)]
        entropy: bool,
    },
    /// Cutoff and smoothed Ecker checks for each `--eps`
    Mollifier(CommonArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Huisken(a) => ("huisken", a),
            Command::Ecker(a) => ("ecker", a),
            Command::Entropy(a) => ("entropy", a),
            Command::Density(a) => ("density", a),
            Command::Verify { common, .. } => ("verify", common),
            Command::Mollifier(a) => ("mollifier", a),
        }
    }
}

fn run(cli: &Cli) -> Result<Status> {
    let (name, args) = cli.command.parts();
    let cfg = RunConfig::resolve(name, args)?;
    rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global()?;
    let mut out = OutputDir::create(&cfg.out)?;
    let status = match &cli.command {
        Command::Huisken(_) => commands::huisken(&cfg, &mut out)?,
        Command::Ecker(_) => commands::ecker(&cfg, &mut out)?,
        Command::Entropy(_) => commands::entropy(&cfg, &mut out)?,
        Command::Density(_) => commands::density(&cfg, &mut out)?,
        Command::Verify { entropy, .. } => commands::verify(&cfg, *entropy, &mut out)?,
        Command::Mollifier(_) => commands::mollifier(&cfg, &mut out)?,
    };
    out.finish(name, &cfg)?;
    Ok(status)
}

/// 2 for configuration errors, 3 for numerical failures, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<mcf_core::Error>() {
        Some(e) if e.is_numerical() => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    let _ = std::io::stdout().flush();
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Rejected) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
