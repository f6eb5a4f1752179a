//! `dforms`: batch driver for dimension tables, invariant rings, the
//! universal family, strata, Hecke products and the acceptance suite.
//!
//! Exit codes: 0 when every check passes, 1 when a computation finished
//! but some check disagreed, 2 on invalid input or exhausted resources.

mod commands;
mod output;

use std::ops::RangeInclusive;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dforms::{Caps, Error};

#[derive(Parser, Debug)]
#[command(name = "dforms", version, about = "Drinfeld modular forms of level (t): dimensions, invariants, Hecke products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output format; CSV carries only the result rows.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized checks (recorded in the report).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest group or orbit enumeration (overrides DFORMS_CAPS).
    #[arg(long, global = true)]
    pub cap_group: Option<usize>,
    /// Largest monomial count in one graded piece (overrides DFORMS_CAPS).
    #[arg(long, global = true)]
    pub cap_monomials: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct FieldRank {
    /// Order of the constant field (a prime power, at most 16).
    #[arg(long)]
    pub q: u64,
    /// Rank.
    #[arg(long, default_value_t = 2)]
    pub r: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank of each graded piece of the Satake ring next to the closed formula.
    Dims {
        #[command(flatten)]
        fr: FieldRank,
        /// Weights, as `lo..hi` (inclusive) or a single value.
        #[arg(long, default_value = "0..4", value_parser = parse_range)]
        k: RangeInclusive<u32>,
    },
    /// Dimensions of invariants of a level group.
    Invariants {
        #[command(flatten)]
        fr: FieldRank,
        #[arg(long, default_value = "0..4", value_parser = parse_range)]
        k: RangeInclusive<u32>,
        /// gl, sl, unipotent, trivial or file:PATH.
        #[arg(long, default_value = "unipotent")]
        group: String,
    },
    /// Coefficients of the universal module and their structural checks.
    Universal {
        #[command(flatten)]
        fr: FieldRank,
        /// Weights at which algebraic independence is checked.
        #[arg(long, default_value = "0..4", value_parser = parse_range)]
        k: RangeInclusive<u32>,
    },
    /// Restriction of the universal family to the stratum of a subspace.
    Strata {
        #[command(flatten)]
        fr: FieldRank,
        /// Basis rows of the subspace, entries separated by spaces, rows by `;`.
        #[arg(long)]
        subspace: String,
    },
    /// Product of two spherical Hecke operators, computed two ways.
    Hecke {
        #[arg(long)]
        q: u64,
        /// Rank; defaults to the length of the types.
        #[arg(long)]
        r: Option<usize>,
        /// First elementary-divisor type, e.g. `0,1`.
        #[arg(long, value_parser = parse_type)]
        a: Exponents,
        #[arg(long, value_parser = parse_type)]
        b: Exponents,
    },
    /// The full acceptance suite.
    Verify,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad weight {t:?}"));
    match s.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(format!("empty range {s:?}"));
            }
            Ok(lo..=hi)
        }
        None => num(s).map(|k| k..=k),
    }
}

/// Comma-separated elementary-divisor exponents.
#[derive(Clone, Debug)]
struct Exponents(Vec<u32>);

fn parse_type(s: &str) -> Result<Exponents, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad exponent {t:?}")))
        .collect::<Result<_, _>>()
        .map(Exponents)
}

/// Outcome of a command that ran to completion.
pub struct Outcome {
    pub report: output::Report,
    pub passed: bool,
}

fn caps(common: &Common) -> Result<Caps, Error> {
    let mut caps = Caps::from_env()?;
    if let Some(g) = common.cap_group {
        caps.group = g;
    }
    if let Some(m) = common.cap_monomials {
        caps.monomials = m;
    }
    Ok(caps)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let caps = caps(&cli.common)?;
    let seed = cli.common.seed;
    match &cli.command {
        Command::Dims { fr, k } => commands::dims(fr, k.clone(), &caps),
        Command::Invariants { fr, k, group } => commands::invariants(fr, k.clone(), group, &caps),
        Command::Universal { fr, k } => commands::universal(fr, k.clone(), &caps),
        Command::Strata { fr, subspace } => commands::strata(fr, subspace, &caps),
        Command::Hecke { q, r, a, b } => commands::hecke(*q, *r, &a.0, &b.0, &caps),
        Command::Verify => commands::verify(seed, &caps),
    }
    .map(|mut o| {
        o.report.seed = seed;
        o
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => match output::emit(&outcome, cli.common.format) {
            Ok(()) if outcome.passed => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(Error::Consistency(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
