use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polarsolve::{load_config, run_experiment, ExperimentKind};

#[derive(Parser)]
#[command(name = "polarsolve", version, about = "Solve the elite persuasion model under majority rule")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single elite, two periods: closed-form candidate comparison.
    #[command(name = "solve-single2p")]
    SolveSingle2p(RunArgs),
    /// Single elite, infinite horizon: value iteration.
    SolveSingle(RunArgs),
    /// Two elites, A leads and B follows once.
    SolveStackelberg(RunArgs),
    /// Two elites alternating: Markov-perfect equilibrium by backward induction.
    SolveMpe(RunArgs),
    /// Cartesian product over `sweep.<axis>` lists.
    Sweep(RunArgs),
    /// Compare the closed-form solvers with brute-force maximizers.
    OracleCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (TOML key = value pairs).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// `key=value`, applied after the config file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("POLARSOLVE_THREADS").ok().and_then(|v| v.parse().ok()) {
        // an already-initialized pool only happens in embedders; ignore it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (kind, args) = match cli.command {
        Command::SolveSingle2p(a) => (ExperimentKind::SolveSingleTwoPeriod, a),
        Command::SolveSingle(a) => (ExperimentKind::SolveSingleInfinite, a),
        Command::SolveStackelberg(a) => (ExperimentKind::SolveStackelberg, a),
        Command::SolveMpe(a) => (ExperimentKind::SolveMpe, a),
        Command::Sweep(a) => (ExperimentKind::Sweep, a),
        Command::OracleCheck(a) => (ExperimentKind::OracleCheck, a),
    };
    let config = match load_config(kind, args.config.as_deref(), &args.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(polarsolve::EXIT_CONFIG as u8);
        }
    };
    match run_experiment(&config, &args.out) {
        Ok(outcome) => {
            if !outcome.converged {
                eprintln!(
                    "warning: {kind} did not converge; outputs written to {}",
                    outcome.dir.display()
                );
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
