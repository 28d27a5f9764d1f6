mod commands;
mod overrides;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "locact",
    version,
    about = "Local activity, passivity and edge-of-chaos analysis of port systems x' = Ax + Pu",
    after_help = "Tolerances are overridden with --tol.<name>=<value>; run `locact tolerances` for the list.\n\
                  Exit codes: 0 verdict produced, 2 input error, 3 no witness available."
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Tolerance override `name=value` (also accepted as --tol.<name>=<value>).
    #[arg(long = "tol", value_name = "NAME=VALUE", global = true)]
    pub tol: Vec<String>,
    /// Random seed; falls back to LOCACT_SEED, then 0.
    #[arg(long, env = "LOCACT_SEED", global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a linear port system and report genericity.
    Analyze(commands::LinearInput),
    /// Construct a verified witness and dump its trajectory as CSV.
    Witness {
        #[command(flatten)]
        input: commands::LinearInput,
        /// CSV file for the columns t, x1..xn, u1..un, integrand.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// FitzHugh–Nagumo cell with dissipation: pipeline report or parameter sweep.
    Fhn(commands::FhnArgs),
    /// Single reaction–diffusion cell from a JSON model spec.
    RdCell {
        /// Model spec file.
        #[arg(long)]
        spec: PathBuf,
    },
    /// Fraction of random systems whose port transform lies in the generic set.
    Genericity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// List the tolerance names and their defaults.
    Tolerances,
}

fn main() -> ExitCode {
    let args = overrides::rewrite_args(std::env::args());
    let cli = Cli::parse_from(args);
    let outcome = match overrides::apply(&cli.common.tol, cli.common.seed) {
        Err(msg) => Err(commands::Failure::Input(msg)),
        Ok(tols) => match &cli.command {
            Command::Analyze(input) => commands::analyze(input, &tols),
            Command::Witness { input, csv } => commands::witness(input, csv.as_deref(), &tols),
            Command::Fhn(a) => commands::fhn(a, &tols),
            Command::RdCell { spec } => commands::rd_cell(spec, &tols),
            Command::Genericity { n, samples } => commands::genericity(*n, *samples, cli.common.seed, &tols),
            Command::Tolerances => Ok(commands::Outcome::ok(commands::tolerance_listing())),
        },
    };
    commands::finish(outcome, cli.common.output.as_deref())
}
