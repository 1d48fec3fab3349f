use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hessian_bellman_cli::{failure_block, run, Command, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    /// Solve one Dirichlet problem and write u.csv and report.txt.
    Solve,
    /// Run the degeneracy ladder g + 1/(2n).
    Ladder,
    /// Run the randomized property batteries.
    Props,
    /// Audit admissibility of a stored grid function.
    Audit,
}

/// Monotone Bellman solver for degenerate m-Hessian equations.
///
/// Set RAYON_NUM_THREADS to bound the worker threads.
#[derive(Debug, Parser)]
#[command(name = "hessian-bellman", version)]
struct Args {
    #[arg(value_enum)]
    command: CommandArg,
    /// Configuration file (`[section]` and `key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the control net and the property batteries.
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(command: Command, kind: &str, field: Option<&str>, message: &str, code: u8) -> ExitCode {
    eprint!("{}", failure_block(Some(command), kind, field, message));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        CommandArg::Solve => Command::Solve,
        CommandArg::Ladder => Command::Ladder,
        CommandArg::Props => Command::Props,
        CommandArg::Audit => Command::Audit,
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(command, "io", None, &format!("{}: {e}", args.config.display()), 2),
    };
    let base = args.config.parent().map(PathBuf::from).unwrap_or_default();
    let mut config = match RunConfig::from_text(&text, command, &base) {
        Ok(c) => c,
        Err(e) => return fail(command, e.kind(), e.field(), &e.to_string(), e.exit_code() as u8),
    };
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    if let Some(out) = args.out {
        config.out_dir = out;
    }
    match run(&config) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for path in &outcome.artifacts {
                println!("wrote {}", path.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                fail(command, "property", None, "one or more asserted properties failed", 1)
            }
        }
        Err(e) => fail(command, e.kind(), e.field(), &e.to_string(), e.exit_code() as u8),
    }
}
