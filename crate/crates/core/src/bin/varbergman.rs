//! Scenario-driven CLI for the variable exponent Bergman space toolkit.
//!
//! `varbergman <subcommand> --scenario <file> [--out <dir>] [--seed <u64>]
//! [--rho-max <f>] [--resolution <radial>x<angular>]`
//!
//! Exit codes: 0 = all asserted checks pass, 1 = input error, 2 = a check
//! asserted by the scenario failed.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use varbergman::cli::{execute, Overrides};

#[derive(Parser)]
#[command(name = "varbergman", version, about = "Variable exponent Bergman space diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an r-lattice and audit its covering/separation contract.
    Lattice(RunArgs),
    /// Compute the modular and Luxemburg norm of a named function.
    Norm(RunArgs),
    /// Run a Carleson ratio sweep (sup or vanishing mode) for a measure.
    Carleson(RunArgs),
    /// Check Toeplitz/projection reproduction on a sample grid.
    Toeplitz(RunArgs),
    /// Evaluate the weighted-composition symbol sup over boundary shells.
    Wco(RunArgs),
    /// Diagnose a difference of weighted composition operators.
    Diff(RunArgs),
    /// Run the named property-check suite.
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for report.json and CSV tables (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the scenario RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario boundary truncation radius.
    #[arg(long = "rho-max")]
    rho_max: Option<f64>,
    /// Override the quadrature resolution, e.g. 300x512.
    #[arg(long)]
    resolution: Option<String>,
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (r, a) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("resolution must look like 300x512, got `{s}`"))?;
    let radial = r
        .trim()
        .parse()
        .map_err(|e| format!("bad radial count `{r}`: {e}"))?;
    let angular = a
        .trim()
        .parse()
        .map_err(|e| format!("bad angular count `{a}`: {e}"))?;
    Ok((radial, angular))
}

fn main() {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Lattice(a) => ("lattice", a),
        Command::Norm(a) => ("norm", a),
        Command::Carleson(a) => ("carleson", a),
        Command::Toeplitz(a) => ("toeplitz", a),
        Command::Wco(a) => ("wco", a),
        Command::Diff(a) => ("diff", a),
        Command::Verify(a) => ("verify", a),
    };
    let resolution = match args.resolution.as_deref().map(parse_resolution) {
        Some(Ok(r)) => Some(r),
        Some(Err(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        None => None,
    };
    let ov = Overrides {
        seed: args.seed,
        rho_max: args.rho_max,
        resolution,
    };
    let code = execute(kind, &args.scenario, args.out.as_deref(), &ov);
    std::process::exit(code);
}
