use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treecorr::enumerate::DEFAULT_CAP;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "treecorr", version, about = "Exact index statistics of random plane trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output format.
    #[arg(long = "out", value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    All,
    Catalog,
    Growth,
    Roots,
    Expansions,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Indices of one tree given as balanced parentheses.
    Indices {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        path: Option<PathBuf>,
    },
    /// Exact sums of monomials over all trees of a size.
    Enumerate {
        #[arg(long, conflicts_with = "max_n")]
        n: Option<usize>,
        /// Emit rows for every size 1..=MAX_N.
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, default_value = "sigma,z,rho,w")]
        tags: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo moments over uniform random trees.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "sigma,z,rho,w")]
        stats: String,
        #[command(flatten)]
        output: Output,
    },
    /// Solve one generating-function system.
    Series {
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 200)]
        order: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Exact moments and correlation of a pair such as sigma:z.
    Moments {
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 200)]
        max_n: usize,
        /// Largest n at which E(W^2) is enumerated.
        #[arg(long, default_value_t = 10)]
        wiener_cap: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Check the asymptotic catalog against computed series.
    Asymptotics {
        #[arg(long, value_enum, default_value_t = Check::All)]
        check: Check,
        #[arg(long, default_value_t = 200)]
        order: usize,
        /// Ratio-fit window LO:HI; defaults to the upper half of the order.
        #[arg(long)]
        window: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Correlation table reproduction with convergence tables.
    Report {
        #[arg(long, default_value_t = 200)]
        order: usize,
        #[arg(long, default_value_t = 10)]
        step: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run the invariant suite; exit 1 on the first failure.
    Verify {
        #[arg(long, default_value_t = 200)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Failed(format!("writing {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Failed(e.to_string()))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Indices { tree, path } => emit(&commands::indices(&tree)?, path.as_ref()),
        Command::Enumerate {
            n,
            max_n,
            tags,
            cap,
            output,
        } => {
            let sizes = match (n, max_n) {
                (Some(n), None) => vec![n],
                (None, Some(m)) => (1..=m).collect(),
                _ => return Err(CliError::Usage("give exactly one of --n or --max-n".into())),
            };
            let text = commands::enumerate(&sizes, &tags, cap, output.format)?;
            emit(&text, output.path.as_ref())
        }
        Command::Sample {
            n,
            count,
            seed,
            stats,
            output,
        } => emit(
            &commands::sample(n, count, seed, &stats, output.format)?,
            output.path.as_ref(),
        ),
        Command::Series {
            system,
            order,
            output,
        } => emit(
            &commands::series(&system, order, output.format)?,
            output.path.as_ref(),
        ),
        Command::Moments {
            pair,
            max_n,
            wiener_cap,
            output,
        } => emit(
            &commands::moments(&pair, max_n, wiener_cap, output.format)?,
            output.path.as_ref(),
        ),
        Command::Asymptotics {
            check,
            order,
            window,
            output,
        } => emit(
            &commands::asymptotics(check, order, window.as_deref(), output.format)?,
            output.path.as_ref(),
        ),
        Command::Report {
            order,
            step,
            output,
        } => emit(
            &commands::report(order, step, output.format)?,
            output.path.as_ref(),
        ),
        Command::Verify { order, seed } => {
            let (text, first_failure) = commands::verify(order, seed);
            emit(&text, None)?;
            match first_failure {
                Some(name) => Err(CliError::Failed(format!("check failed: {name}"))),
                None => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
