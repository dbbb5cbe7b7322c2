use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sympcrit_cli::{
    check_ellipticity_command, check_identities_command, convergence_order_command, load_config, run_command,
    CliError, RunConfig,
};

#[derive(Parser)]
#[command(name = "sympcrit", version, about = "Symplectic graph surfaces in C²: flow runs and identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value configuration file
    #[arg(long)]
    config: PathBuf,
    /// output directory, overrides `out` in the config
    #[arg(long)]
    out: Option<PathBuf>,
    /// seed for randomized suites and presets, overrides `seed`
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the gradient flow and write diagnostics and heatmaps
    Run(Common),
    /// Algebraic, residual and rate identities on the configured surface
    CheckIdentities(Common),
    /// Sample the principal symbol determinant
    CheckEllipticity(Common),
    /// Refinement studies with observed orders
    ConvergenceOrder(Common),
}

fn config(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = load_config(&c.config)?;
    if let Some(out) = &c.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = match &cli.command {
        Command::Run(c) => config(c).and_then(|cfg| run_command(&cfg, &mut stdout).map(|_| true)),
        Command::CheckIdentities(c) => config(c).and_then(|cfg| check_identities_command(&cfg, &mut stdout)),
        Command::CheckEllipticity(c) => config(c).and_then(|cfg| check_ellipticity_command(&cfg, &mut stdout)),
        Command::ConvergenceOrder(c) => config(c).and_then(|cfg| convergence_order_command(&cfg, &mut stdout)),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
