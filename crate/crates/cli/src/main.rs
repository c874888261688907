//! `grk`: reference tables, GRK simulations, hierarchy runs and gap sweeps.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use grk_core::tables::TableId;
use grk_core::FinalOp;

use output::Format;

const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_TOLERANCE: u8 = 4;
const EXIT_IO: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "grk", version, about = "Grover partial search on a partitioned database")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format; simulate, schedule and hierarchy default to json, the rest to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Omit the generation timestamp so identical runs give identical bytes.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one partial search and report the final state.
    Simulate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        /// `j1,j2` (real counts use the closed-form evolution) or `optimal`.
        #[arg(long, default_value = "optimal")]
        schedule: ScheduleArg,
        #[arg(long, default_value = "g1")]
        final_op: FinalOp,
        /// Cross-check against the full N-vector when N is at most this.
        #[arg(long, default_value_t = 4096)]
        full_vector_cap: u64,
    },
    /// Optimal real and integer iteration counts.
    Schedule {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value = "g1")]
        final_op: FinalOp,
    },
    /// Run a hierarchy of partial searches, coarsest level first.
    Hierarchy {
        #[arg(long)]
        n: u64,
        /// Block counts per level, e.g. `2,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<u64>,
        /// What to do with a negative global count at a deeper level.
        #[arg(long, value_enum, default_value_t = Policy::Invert)]
        policy: Policy,
    },
    /// Recompute a reference table and its deviations from the printed values.
    Tables { which: TableId },
    /// Gap between two-level and direct search over a grid of block counts.
    Sweep {
        /// Inclusive range `a..b` or a single value, within [2, 1024].
        #[arg(long)]
        k1: KRange,
        #[arg(long)]
        k2: KRange,
    },
    /// Number of ways to split N items into K equal blocks.
    Partitions {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        /// Largest N for which the count is computed exactly.
        #[arg(long, default_value_t = grk_core::partitions::DEFAULT_EXACT_CAP)]
        exact_cap: u64,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Policy {
    Invert,
    Clamp,
}

#[derive(Debug, Clone, Copy)]
enum ScheduleArg {
    Optimal,
    Explicit(f64, f64),
}

impl FromStr for ScheduleArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "optimal" {
            return Ok(ScheduleArg::Optimal);
        }
        let bad = || format!("expected `optimal` or `j1,j2`, got {s:?}");
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let j1: f64 = a.trim().parse().map_err(|_| bad())?;
        let j2: f64 = b.trim().parse().map_err(|_| bad())?;
        Ok(ScheduleArg::Explicit(j1, j2))
    }
}

const K_MIN: u64 = 2;
const K_MAX: u64 = 1024;

#[derive(Debug, Clone, Copy)]
struct KRange {
    lo: u64,
    hi: u64,
}

impl KRange {
    fn values(self) -> std::ops::RangeInclusive<u64> {
        self.lo..=self.hi
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad block count {t:?}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        if lo < K_MIN || hi > K_MAX {
            return Err(format!("range {s:?} leaves [{K_MIN}, {K_MAX}]"));
        }
        Ok(KRange { lo, hi })
    }
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Domain(grk_core::Error),
    /// Output was produced but a check on it failed.
    Tolerance(String),
    Io(anyhow::Error),
}

impl From<grk_core::Error> for Failure {
    fn from(e: grk_core::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (doc, check, default_format) = match cli.command {
        Command::Simulate {
            n,
            k,
            schedule,
            final_op,
            full_vector_cap,
        } => {
            let schedule = match schedule {
                ScheduleArg::Optimal => None,
                ScheduleArg::Explicit(j1, j2) => Some((j1, j2)),
            };
            (commands::simulate(n, k, schedule, final_op, full_vector_cap)?, Ok(()), Format::Json)
        }
        Command::Schedule { n, k, final_op } => (commands::schedule(n, k, final_op)?, Ok(()), Format::Json),
        Command::Hierarchy { n, k, policy } => {
            let policy = match policy {
                Policy::Invert => grk_core::NegativeGlobalPolicy::Invert,
                Policy::Clamp => grk_core::NegativeGlobalPolicy::Clamp,
            };
            (commands::hierarchy(n, k, policy)?, Ok(()), Format::Json)
        }
        Command::Tables { which } => {
            let (doc, check) = commands::tables(which)?;
            (doc, check, Format::Csv)
        }
        Command::Sweep { k1, k2 } => {
            let (doc, check) = commands::sweep(k1.values(), k2.values())?;
            (doc, check, Format::Csv)
        }
        Command::Partitions { n, k, exact_cap } => (commands::partitions(n, k, exact_cap)?, Ok(()), Format::Csv),
    };
    let text = doc.render(cli.output.format.unwrap_or(default_format), !cli.output.no_timestamp)?;
    match &cli.output.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    check.map_err(Failure::Tolerance)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(Failure::Tolerance(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(EXIT_TOLERANCE)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_IO)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges() {
        let r: KRange = "2..8".parse().unwrap();
        assert_eq!(r.values().count(), 7);
        assert_eq!("5".parse::<KRange>().unwrap().values().collect::<Vec<_>>(), vec![5]);
        assert!("8..2".parse::<KRange>().is_err());
        assert!("1..4".parse::<KRange>().is_err());
        assert!("2..1025".parse::<KRange>().is_err());
    }

    #[test]
    fn schedules() {
        assert!(matches!("optimal".parse(), Ok(ScheduleArg::Optimal)));
        assert!(matches!("3,2".parse(), Ok(ScheduleArg::Explicit(j1, j2)) if j1 == 3.0 && j2 == 2.0));
        assert!("3".parse::<ScheduleArg>().is_err());
    }

    #[test]
    fn usage_code_matches_clap() {
        let e = Cli::try_parse_from(["grk", "tables", "table9"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE as i32);
    }
}
