//! `idxdiv`: index divisibility sets, divisibility graphs, primitive
//! divisors and local criteria from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigFile, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl From<idxdiv::Error> for CliError {
    fn from(e: idxdiv::Error) -> Self {
        use idxdiv::Error as E;
        match e {
            E::BitBudgetExceeded { .. } | E::Undecided { .. } => CliError::Budget(e.to_string()),
            E::NonExactDivision { .. } => CliError::Invariant(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "idxdiv", version, about = "Index divisibility sets of integer polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key = value file supplying defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: one per core)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Include elapsed time in records (makes output nondeterministic)
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Args)]
struct PolyArgs {
    /// Polynomial in x, e.g. "x^13+x^3+5"
    #[arg(long)]
    poly: Option<String>,

    /// x^d + x^e + c given as d,e,c
    #[arg(long, allow_hyphen_values = true)]
    trinomial: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Members of D(f) up to N with the tail and cycle of 0 modulo each
    Divset {
        #[command(flatten)]
        target: PolyArgs,
        #[arg(long = "N")]
        bound: Option<u64>,
    },
    /// Index divisibility graph up to N
    Graph {
        #[command(flatten)]
        target: PolyArgs,
        #[arg(long = "N")]
        bound: Option<u64>,
    },
    /// Primitive parts, Zsigmondy set and growth bounds of the orbit of 0
    Zsig {
        #[command(flatten)]
        target: PolyArgs,
        #[arg(long = "n-max")]
        n_max: Option<usize>,
        /// Per-term bit budget
        #[arg(long)]
        bits: Option<u64>,
        /// Window bound for the finiteness verdict (trinomials)
        #[arg(long = "N")]
        bound: Option<u64>,
    },
    /// Permutation profile and exclusion predicates modulo a prime
    Perm {
        #[command(flatten)]
        target: PolyArgs,
        #[arg(long = "p")]
        prime: Option<u64>,
    },
    /// Edge-type survey over a one-parameter family
    Survey {
        /// Polynomial in x and the parameter c, e.g. "x^3+x+c"
        #[arg(long)]
        family: Option<String>,
        /// Parameter range a..b (inclusive)
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long = "N")]
        bound: Option<u64>,
    },
    /// Primes up to P
    Primes {
        #[arg(long = "P")]
        bound: Option<u64>,
    },
    /// Fraction of primes up to P with p = 1 mod 8 and ord_p(2) odd
    Density {
        #[arg(long = "P")]
        bound: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let common = config::Common {
        workers: file.pick(cli.workers, "workers")?,
        format: file.format(cli.format)?.unwrap_or(Format::Records),
        output: file.pick(cli.output, "output")?,
        timing: file.flag(cli.timing, "timing")?,
    };
    if let Some(n) = common.workers {
        let n = config::at_least_one(n, "--workers")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
    }
    let target = |t: PolyArgs| config::resolve_target(file.pick(t.poly, "poly")?, file.pick(t.trinomial, "trinomial")?);
    match cli.command {
        Command::Divset { target: t, bound } => {
            commands::divset(&common, target(t)?, file.pick(bound, "N")?.unwrap_or(commands::DEFAULT_BOUND))
        }
        Command::Graph { target: t, bound } => {
            commands::graph(&common, target(t)?, file.pick(bound, "N")?.unwrap_or(commands::DEFAULT_BOUND))
        }
        Command::Zsig { target: t, n_max, bits, bound } => commands::zsig(
            &common,
            target(t)?,
            file.pick(n_max, "n-max")?.unwrap_or(idxdiv::zsigmondy::DEFAULT_N_MAX),
            file.pick(bits, "bits")?.unwrap_or(idxdiv::orbit::DEFAULT_BIT_BUDGET),
            file.pick(bound, "N")?.unwrap_or(commands::DEFAULT_BOUND),
        ),
        Command::Perm { target: t, prime } => {
            let p = file.pick(prime, "p")?.ok_or_else(|| CliError::Usage("--p is required".into()))?;
            commands::perm(&common, target(t)?, p)
        }
        Command::Survey { family, c, bound } => {
            let family = file
                .pick(family, "family")?
                .ok_or_else(|| CliError::Usage("--family is required".into()))?;
            let range = config::parse_range(&file.pick(c, "c")?.ok_or_else(|| CliError::Usage("--c is required".into()))?)?;
            commands::survey(&common, &family, range, file.pick(bound, "N")?.unwrap_or(commands::DEFAULT_BOUND))
        }
        Command::Primes { bound } => {
            let bound = file.pick(bound, "P")?.ok_or_else(|| CliError::Usage("--P is required".into()))?;
            commands::primes(&common, bound)
        }
        Command::Density { bound } => {
            commands::density(&common, file.pick(bound, "P")?.unwrap_or(commands::DEFAULT_DENSITY_BOUND))
        }
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
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("idxdiv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let budget = idxdiv::Error::BitBudgetExceeded {
            last_safe_index: 3,
            next_index: 4,
            budget_bits: 64,
        };
        assert_eq!(CliError::from(budget).exit_code(), 2);
        assert_eq!(CliError::from(idxdiv::Error::NonExactDivision { n: 6 }).exit_code(), 3);
        assert_eq!(CliError::from(idxdiv::Error::ZeroModulus).exit_code(), 1);
    }
}
