//! `coherent-age`: certify ageing-faster orders between coherent systems.

mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use spec::{LoadedSpec, Overrides};

#[derive(Parser, Debug)]
#[command(name = "coherent-age", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Size of both the p grid and the x grid.
    #[arg(long, global = true)]
    grid_size: Option<usize>,
    /// Monotonicity tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Simulation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Functionals of h are checked on [eps, 1 - eps].
    #[arg(long, global = true)]
    eps_endpoint: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate p, h, h', H and R for one system.
    Distortion {
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        system: u8,
    },
    /// Check an order between the two margins, or the two systems with --direct.
    CheckOrder {
        spec: PathBuf,
        #[arg(long)]
        direct: bool,
    },
    /// Run the sufficient-condition pipeline and write a JSON report.
    Verify { spec: PathBuf },
    /// Compare a simulated survival curve with the analytic one.
    Simulate {
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        system: u8,
    },
    /// Index rule for two k-out-of-n systems.
    Corollary { spec: PathBuf },
}

impl Command {
    fn spec_path(&self) -> &PathBuf {
        match self {
            Command::Distortion { spec, .. }
            | Command::CheckOrder { spec, .. }
            | Command::Verify { spec }
            | Command::Simulate { spec, .. }
            | Command::Corollary { spec } => spec,
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("COHERENT_AGE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("COHERENT_AGE_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    configure_threads()?;
    let path = cli.command.spec_path();
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut spec = LoadedSpec::parse(&bytes)?;
    spec.apply(&Overrides {
        grid_size: cli.grid_size,
        tol: cli.tol,
        seed: cli.seed,
        eps_endpoint: cli.eps_endpoint,
    });
    match &cli.command {
        Command::Distortion { system, .. } => commands::distortion(&spec, *system),
        Command::CheckOrder { direct, .. } => commands::check_order_cmd(&spec, *direct),
        Command::Verify { .. } => commands::verify_cmd(&spec),
        Command::Simulate { system, .. } => commands::simulate(&spec, *system),
        Command::Corollary { .. } => commands::corollary(&spec),
    }
}

/// Numeric breakdowns map to 3; everything else is a usage or schema error.
fn error_code(err: &anyhow::Error) -> u8 {
    use coherent_age::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::QuadratureNonConvergence { .. } | E::RejectionCap { .. } | E::EmptyGrid { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
