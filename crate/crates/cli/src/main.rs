use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

mod bench;
mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "fracprop",
    version,
    about = "Solution operators for lower-triangular time-fractional systems"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Run configuration (JSON, "schema": 1)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for per-mode work
    #[arg(long, global = true, env = "FRACPROP_WORKERS")]
    workers: Option<usize>,
    /// Overrides the solve tolerance of the configuration
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Directory for output files; stdout when absent
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Run only the verification checks whose name starts with CHECK
    #[arg(long, global = true, value_name = "CHECK")]
    only: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the system: order condition, homogeneity, ellipticity, order range
    Validate,
    /// Solve on the configured times and write the solution
    Solve,
    /// Run the verification checks
    Verify,
    /// Evaluate E_{beta,mu}(x)
    Ml {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Time propagator evaluation against equation count and worker count
    Bench,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let code = match cli.command {
        Command::Validate => commands::validate(g),
        Command::Solve => commands::solve(g),
        Command::Verify => commands::verify(g),
        Command::Ml { beta, mu, x } => commands::ml(beta, mu, x),
        Command::Bench => bench::run(g),
    };
    ExitCode::from(code)
}
