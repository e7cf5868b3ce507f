use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use covsat::generate::FuzzConfig;
use covsat::harness::{self, DifferentialReport};
use covsat::report::{trace_hash, SolveReport};
use covsat::{decomp_format, dimacs, probe};
use covsat_core::solver::{solve_covering, solve_sat};
use covsat_core::{Orientation, SatVerdict, SolverConfig, Verdict};

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_ENGINE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "covsat", version, about = "Special-covering SAT engine and test harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphaSide {
    /// α rows hold the negative literal occurrences.
    Neg,
    /// α rows hold the positive literal occurrences.
    Pos,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a DIMACS CNF file. Exits 10 on SAT, 20 on UNSAT.
    Solve {
        file: PathBuf,
        /// Print a JSON record instead of DIMACS-style output.
        #[arg(long)]
        json: bool,
        /// Write the event trace to this file.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        #[arg(long)]
        count_ops: bool,
        #[arg(long, value_enum, default_value = "neg")]
        alpha: AlphaSide,
        /// Stop early on a row whose both sides are single-blocked.
        #[arg(long)]
        shortcut: bool,
    },
    /// Search for a covering of a `.decomp` file.
    Covering {
        file: PathBuf,
        #[arg(long)]
        count_ops: bool,
    },
    /// Differential run on seeded random instances.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value = "1..20", value_parser = parse_range)]
        vars: RangeInclusive<usize>,
        #[arg(long, default_value = "1..80", value_parser = parse_range)]
        clauses: RangeInclusive<usize>,
        #[arg(long, default_value = "1..3", value_parser = parse_range)]
        width: RangeInclusive<usize>,
        #[arg(long)]
        planted: bool,
    },
    /// Differential run over every small formula.
    DiffExhaustive {
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long, default_value_t = 3)]
        max_width: usize,
    },
    /// Operation counts on planted 3-SAT of the given sizes.
    Probe {
        #[arg(long, value_delimiter = ',', default_value = "1e2,1e3,1e4", value_parser = parse_size)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Parses `a..b` (inclusive) or a single number.
fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.trim_start_matches('='))?),
        None => num(s).map(|v| v..=v),
    }
}

/// Parses sizes such as `1000` or `1e5`.
fn parse_size(s: &str) -> Result<usize, String> {
    let v: f64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if !(v >= 1.0 && v.fract() == 0.0 && v < 1e12) {
        return Err(format!("{s:?} is not a positive integer size"));
    }
    Ok(v as usize)
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_INPUT)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            file,
            json,
            trace,
            count_ops,
            alpha,
            shortcut,
        } => solve(&file, json, trace, count_ops, alpha, shortcut),
        Command::Covering { file, count_ops } => covering(&file, count_ops),
        Command::Fuzz {
            seed,
            count,
            vars,
            clauses,
            width,
            planted,
        } => {
            let cfg = FuzzConfig {
                seed,
                count,
                vars,
                clauses,
                width,
                planted,
            };
            match cfg.validate() {
                Ok(()) => Ok(print_report(&harness::differential_run(&cfg))),
                Err(e) => {
                    eprintln!("error: {e}");
                    Err(ExitCode::from(EXIT_INPUT))
                }
            }
        }
        Command::DiffExhaustive {
            max_n,
            max_m,
            max_width,
        } => {
            if max_n > 5 || max_n == 0 {
                eprintln!("error: --max-n must be in 1..=5");
                Err(ExitCode::from(EXIT_INPUT))
            } else {
                Ok(print_report(&harness::exhaustive_differential(max_n, max_m, max_width)))
            }
        }
        Command::Probe { sizes, seed } => Ok(print_report(&probe::run(&sizes, seed))),
    };
    result.unwrap_or_else(|code| code)
}

fn print_report(r: &DifferentialReport) -> ExitCode {
    println!("{}", serde_json::to_string_pretty(r).expect("report serializes"));
    eprintln!(
        "total {} agree {} disagree {} engine-errors {} gate-violations {} invariant-violations {} oracle-unknown {}",
        r.total,
        r.agreements,
        r.disagreements.len(),
        r.gate_failures.len() - r.violations(),
        r.gate_violations,
        r.invariant_violations,
        r.oracle_unknown
    );
    if r.violations() > 0 {
        ExitCode::from(EXIT_VIOLATION)
    } else {
        ExitCode::SUCCESS
    }
}

fn solve(
    file: &PathBuf,
    json: bool,
    trace_out: Option<PathBuf>,
    count_ops: bool,
    alpha: AlphaSide,
    shortcut: bool,
) -> Result<ExitCode, ExitCode> {
    let text = read(file)?;
    let (f, _) = dimacs::parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", file.display());
        ExitCode::from(EXIT_INPUT)
    })?;
    let config = SolverConfig {
        count_ops,
        trace: true,
        orientation: match alpha {
            AlphaSide::Neg => Orientation::NegativeAlpha,
            AlphaSide::Pos => Orientation::PositiveAlpha,
        },
        shortcut,
        check_invariants: false,
    };
    let start = Instant::now();
    let run = solve_sat(&f, &config);
    let elapsed_ms = start.elapsed().as_millis();

    if let Some(path) = trace_out {
        fs::write(&path, run.trace.render()).map_err(|e| {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(EXIT_INPUT)
        })?;
    }
    let code = match &run.verdict {
        SatVerdict::Sat { .. } => EXIT_SAT,
        SatVerdict::Unsat { .. } => EXIT_UNSAT,
        SatVerdict::EngineError { .. } => EXIT_ENGINE,
    };
    if json {
        let clauses = f.clauses.len() + usize::from(f.has_empty_clause);
        let rep = SolveReport::new(
            &file.display().to_string(),
            f.num_vars,
            clauses,
            f.literal_count(),
            &run,
            elapsed_ms,
        );
        println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
    } else {
        match &run.verdict {
            SatVerdict::Sat { assignment } => {
                println!("s SATISFIABLE");
                let lits: Vec<String> = assignment.to_literals().iter().map(i64::to_string).collect();
                println!("v {} 0", lits.join(" "));
            }
            SatVerdict::Unsat { reason } => {
                println!("s UNSATISFIABLE");
                println!("c reason {reason}");
            }
            SatVerdict::EngineError { detail } => {
                println!("s UNKNOWN");
                eprintln!("error: engine: {detail}");
            }
        }
        if count_ops {
            println!("c ops {}", run.ops.total());
        }
        println!("c trace {}", trace_hash(&run.trace));
    }
    Ok(ExitCode::from(code))
}

fn covering(file: &PathBuf, count_ops: bool) -> Result<ExitCode, ExitCode> {
    let text = read(file)?;
    let pair = decomp_format::parse(&text).map_err(|e| {
        eprintln!("error: {}: {e}", file.display());
        ExitCode::from(EXIT_INPUT)
    })?;
    let config = SolverConfig {
        count_ops,
        ..SolverConfig::default()
    };
    let run = solve_covering(&pair, &config);
    let code = match &run.verdict {
        Ok(Verdict::CoveringFound { swaps }) => {
            let rows: Vec<String> = swaps.to_one_based().iter().map(usize::to_string).collect();
            println!("covering swaps [{}]", rows.join(" "));
            EXIT_SAT
        }
        Ok(Verdict::NoCovering { reason }) => {
            println!("no covering: {reason}");
            EXIT_UNSAT
        }
        Err(fault) => {
            eprintln!("error: engine: {fault}");
            EXIT_ENGINE
        }
    };
    if count_ops {
        println!("ops {}", run.ops.total());
    }
    Ok(ExitCode::from(code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_sizes() {
        assert_eq!(parse_range("2..5"), Ok(2..=5));
        assert_eq!(parse_range("2..=5"), Ok(2..=5));
        assert_eq!(parse_range("4"), Ok(4..=4));
        assert!(parse_range("a..3").is_err());
        assert_eq!(parse_size("1e5"), Ok(100_000));
        assert_eq!(parse_size("250"), Ok(250));
        assert!(parse_size("0.5").is_err());
    }
}
