//! Thin batch CLI over the library; see the `cli` module for the command
//! implementations and the exit-code contract.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ruelle_realize::cli::{exit_code_for, run, Command as JobCommand, JobConfig};
use ruelle_realize::wavelet::Convention;

#[derive(Parser)]
#[command(
    name = "ruelle-realize",
    about = "State-space realization toolkit: wavelet filters, autocorrelation, Ruelle operators, cascades",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Input JSON file (realization or filter, depending on the command)
    #[arg(long)]
    input: PathBuf,
    /// Output file for the CSV/JSON artifact
    #[arg(long)]
    output: Option<PathBuf>,
    /// Scaling / band count N
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    /// Numeric tolerance for truncation decisions
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Symbol normalization: unit-dc | paper-polyphase
    #[arg(long)]
    convention: Option<String>,
    /// Grid spec: a count, or min:max:step for cascade
    #[arg(long)]
    grid: Option<String>,
    /// Window spec: a count, or lmin,lmax,kmin,kmax for ruelle
    #[arg(long)]
    window: Option<String>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Validate a filter JSON: unitarity, M(1) = I, R1 constancy
    FilterCheck(CommonArgs),
    /// Export autocorrelation coefficients (n, Re c_n, Im c_n) as CSV
    Markov(CommonArgs),
    /// Export the slanted Ruelle matrix window and both traces
    Ruelle(CommonArgs),
    /// Report both trace formulas and the coefficient-route cross-check
    Trace(CommonArgs),
    /// Sample the father-wavelet transform over a w grid
    Cascade(CommonArgs),
    /// Partial cascade-product L2 integrals per k
    L2check(CommonArgs),
    /// Certified finite product along z_k = e^{i*pi/2^k}
    ProductDemo(CommonArgs),
}

fn to_config(command: JobCommand, args: CommonArgs) -> Result<JobConfig, String> {
    let convention = match &args.convention {
        None => None,
        Some(s) => Some(Convention::parse(s).map_err(|e| e.to_string())?),
    };
    let seed = std::env::var("RUELLE_REALIZE_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(0xA11CE);
    Ok(JobConfig {
        command,
        input: args.input,
        output: args.output,
        n: args.n,
        tol: args.tol,
        convention,
        grid: args.grid,
        window: args.window,
        seed,
    })
}

fn main() {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        CliCommand::FilterCheck(a) => (JobCommand::FilterCheck, a),
        CliCommand::Markov(a) => (JobCommand::Markov, a),
        CliCommand::Ruelle(a) => (JobCommand::Ruelle, a),
        CliCommand::Trace(a) => (JobCommand::Trace, a),
        CliCommand::Cascade(a) => (JobCommand::Cascade, a),
        CliCommand::L2check(a) => (JobCommand::L2Check, a),
        CliCommand::ProductDemo(a) => (JobCommand::ProductDemo, a),
    };
    let config = match to_config(command, args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            println!("{}", outcome.report);
            std::process::exit(outcome.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    }
}
