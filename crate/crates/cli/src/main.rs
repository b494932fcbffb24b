use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

use commands::{CliError, Outcome};
use config::RunConfig;

/// Explicit and reference solutions of the linearized Boussinesq system
/// around stratified Couette flow, with decay and spectral checks.
#[derive(Parser)]
#[command(name = "boussinesq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value configuration file.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set beta=1.0`. Applied after the file, in order.
    #[arg(short, long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// W, W', K0 and ODE residuals on a log-spaced zeta grid.
    SpecfunTable,
    /// Closed-form snapshots, one file per time.
    SolveExplicit,
    /// Method-of-lines snapshots, one file per time.
    SolveReference,
    /// Relative L2 differences between the two solvers.
    Compare,
    /// Norm series and decay-law fits.
    DecayStudy,
    /// Jump formula, Taylor-Goldstein residual and t = 0 reconstruction.
    LapCheck,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = RunConfig::load(cli.config.as_deref(), &cli.set).map_err(CliError::Config)?;
    match cli.command {
        Command::SpecfunTable => commands::specfun_table(&cfg),
        Command::SolveExplicit => commands::solve_explicit(&cfg),
        Command::SolveReference => commands::solve_reference(&cfg),
        Command::Compare => commands::compare(&cfg),
        Command::DecayStudy => commands::decay_study(&cfg),
        Command::LapCheck => commands::lap_check(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            for c in out.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} = {:e} (tolerance {:e})", c.name, c.value, c.tolerance);
            }
            ExitCode::from(if out.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
