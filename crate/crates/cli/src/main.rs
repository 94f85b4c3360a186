use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpdelta::azflag::Convention;
use dpdelta_cli::commands::{cmd_delta, cmd_report, cmd_resolve, cmd_svalues, cmd_verify, cmd_zariski, GridSpec};
use dpdelta_cli::{CliError, ReportEnvelope};

#[derive(Parser)]
#[command(name = "dpdelta", version, about = "Exact verification of a local stability threshold on a degree-2 del Pezzo surface")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit the full JSON envelope.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Args)]
struct Pair {
    #[arg(long)]
    a: u64,
    #[arg(long)]
    b: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Concentrated,
    Split,
    Both,
}

impl ConventionArg {
    fn conventions(self) -> Vec<Convention> {
        match self {
            ConventionArg::Concentrated => vec![Convention::Concentrated],
            ConventionArg::Split => vec![Convention::EqualSplit],
            ConventionArg::Both => Convention::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Resolve the two cyclic quotient points and contract back down.
    Resolve(Pair),
    /// Zariski decomposition of the anticanonical family along E.
    Zariski {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// S(-K; E), A/S, the ratio grid and its exact minimum.
    Delta {
        #[arg(long, requires = "b")]
        a: Option<u64>,
        #[arg(long, requires = "a")]
        b: Option<u64>,
        /// Rational grid `lo:hi:n` in mu = a/b.
        #[arg(long)]
        grid: Option<GridSpec>,
        #[arg(long)]
        minimize: bool,
    },
    /// Refined S-values at the points of E.
    Svalues {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value_t = ConventionArg::Both)]
        convention: ConventionArg,
    },
    /// Run every invariant over all chamber pairs with a <= max.
    Verify {
        #[arg(long)]
        max: u64,
    },
    /// Limits, flags and reference constants.
    Report {
        #[arg(long, value_enum, default_value_t = ConventionArg::Both)]
        convention: ConventionArg,
    },
}

fn run(cli: &Cli) -> Result<ReportEnvelope, CliError> {
    match &cli.command {
        Command::Resolve(p) => cmd_resolve(p.a, p.b),
        Command::Zariski { pair, samples } => cmd_zariski(pair.a, pair.b, *samples),
        Command::Delta { a, b, grid, minimize } => cmd_delta(a.zip(*b), grid.as_ref(), *minimize),
        Command::Svalues { pair, convention } => cmd_svalues(pair.a, pair.b, &convention.conventions()),
        Command::Verify { max } => cmd_verify(*max),
        Command::Report { convention } => cmd_report(&convention.conventions()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut env = match run(&cli) {
        Ok(env) => env,
        Err(e) => {
            eprintln!("dpdelta: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    env.timing = start.elapsed();
    let out = if cli.json {
        env.to_json()
    } else if cli.csv {
        env.to_csv()
    } else {
        env.to_text()
    };
    print!("{out}");
    eprintln!("dpdelta {}: {:.3}s", env.command, env.timing.as_secs_f64());
    if env.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
