use std::path::PathBuf;

use clap::{Parser, Subcommand};

use sheath_cli::{execute, Command, Invocation, Overrides};

#[derive(Parser)]
#[command(name = "sheath", version, about = "Stationary plasma sheath solver")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Marginal band half-width for d2V0.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Scan range for the positivity bound.
    #[arg(long, global = true)]
    phi_max: Option<f64>,
    /// Number of grid points.
    #[arg(long, global = true)]
    grid: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Bohm integral, d2V0, classification and sup B / inf B.
    CheckBohm,
    /// Kinetic sheath profile and moments.
    Solve,
    /// Fluid-model profile.
    Hydro,
    /// Kinetic-to-fluid convergence study.
    SweepEps,
    /// Wall potential from flux balance.
    ReduceWall,
    /// Necessary conditions and density bounds.
    Validate,
}

fn main() {
    let cli = Cli::parse();
    let Some(scenario) = cli.scenario else {
        eprintln!("{}", sheath_cli::CliError::invalid("--scenario is required").to_json());
        std::process::exit(3);
    };
    let command = match cli.command {
        Cmd::CheckBohm => Command::CheckBohm,
        Cmd::Solve => Command::Solve,
        Cmd::Hydro => Command::Hydro,
        Cmd::SweepEps => Command::SweepEps,
        Cmd::ReduceWall => Command::ReduceWall,
        Cmd::Validate => Command::Validate,
    };
    let overrides = Overrides { tolerance: cli.tolerance, phi_max: cli.phi_max, grid: cli.grid };
    std::process::exit(execute(&Invocation { command, scenario, out: cli.out, overrides }));
}
