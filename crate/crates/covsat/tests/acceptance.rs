//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use covsat::generate::{for_each_small_formula, random_cnf, FuzzConfig};
use covsat::harness::{
    exhaustive_differential, exhaustive_reduction_check, oracle_answer, order_independence, structural_check,
    Answer, DifferentialReport, Collector,
};
use covsat::{dimacs, probe};
use covsat_core::solver::solve_sat;
use covsat_core::{Assignment, CnfFormula, Reason, SatVerdict, SolverConfig};

const REDUCTION_BUDGET: Duration = Duration::from_secs(60);
const SOUNDNESS_BUDGET: Duration = Duration::from_secs(300);
const PROBE_BUDGET: Duration = Duration::from_secs(600);
const FUZZ_COUNT: usize = 10_000;
const ORDER_INSTANCES: usize = 1_000;
const ORDER_CAP: usize = 24;
const ROUND_TRIPS: u64 = 1_000;
const DETERMINISM_RUNS: usize = 5;
const PROBE_SIZES: [usize; 4] = [100, 1_000, 10_000, 100_000];

fn fuzz_config() -> FuzzConfig {
    FuzzConfig {
        seed: 20_240_601,
        count: FUZZ_COUNT,
        vars: 1..=30,
        clauses: 1..=120,
        width: 1..=4,
        planted: false,
    }
}

fn fuzz_instances() -> Vec<CnfFormula> {
    let cfg = fuzz_config();
    (0..cfg.count as u64).map(|i| random_cnf(&cfg, i)).collect()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn reduction() -> Outcome {
    let start = Instant::now();
    let r = exhaustive_reduction_check(3, 4, 3);
    let t = start.elapsed();
    outcome(
        r.passed() && r.formulas == 27_405 && t < REDUCTION_BUDGET,
        format!("{} formulas, {} mismatches, {:.1?}", r.formulas, r.mismatches.len(), t),
    )
}

fn soundness(exhaustive: &DifferentialReport, fuzz: &DifferentialReport, t: Duration) -> Outcome {
    let bad = exhaustive.gate_violations + fuzz.gate_violations;
    let errors = exhaustive.gate_failures.len() + fuzz.gate_failures.len() - bad;
    outcome(
        bad == 0 && t < SOUNDNESS_BUDGET,
        format!(
            "{} instances, {} failing SAT assignments, {} archived engine errors, {:.1?}",
            exhaustive.total + fuzz.total + exhaustive.oracle_unknown + fuzz.oracle_unknown,
            bad,
            errors,
            t
        ),
    )
}

fn worked_fixtures() -> Outcome {
    let config = SolverConfig {
        trace: true,
        ..SolverConfig::default()
    };
    let expect = [
        (
            "e1",
            SatVerdict::Sat {
                assignment: Assignment {
                    values: vec![true, true],
                },
            },
        ),
        (
            "e2",
            SatVerdict::Unsat {
                reason: Reason::NonRemovableUselessVertex { vertex: 0 },
            },
        ),
        (
            "e3",
            SatVerdict::Unsat {
                reason: Reason::UnreachableColumn { column: 0 },
            },
        ),
    ];
    let mut failed = Vec::new();
    for (name, verdict) in expect {
        let text = std::fs::read_to_string(fixtures().join(format!("{name}.cnf"))).unwrap();
        let trace = std::fs::read_to_string(fixtures().join(format!("{name}.trace"))).unwrap();
        let (f, _) = dimacs::parse(&text).unwrap();
        let run = solve_sat(&f, &config);
        if run.verdict != verdict {
            failed.push(format!("{name} verdict {:?}", run.verdict));
        }
        if run.trace.render_events() != trace {
            failed.push(format!("{name} trace"));
        }
    }
    outcome(failed.is_empty(), if failed.is_empty() { "E1, E2, E3 exact".into() } else { failed.join("; ") })
}

fn structural(fuzz: &[CnfFormula], reports: &[&DifferentialReport]) -> Outcome {
    let mut first = None;
    let mut failures = 0;
    for (i, f) in fuzz.iter().enumerate() {
        if let Err(e) = structural_check(f) {
            failures += 1;
            first.get_or_insert(format!("index {i}: {e}"));
        }
    }
    let counted: usize = reports.iter().map(|r| r.invariant_violations).sum();
    outcome(
        failures == 0 && counted == 0,
        format!(
            "{} inputs, {} structural failures, {} invariant violations during solves{}",
            fuzz.len(),
            failures,
            counted,
            first.map(|s| format!(", first {s}")).unwrap_or_default()
        ),
    )
}

fn order() -> Outcome {
    let cfg = FuzzConfig {
        seed: 77,
        count: 0,
        vars: 3..=10,
        clauses: 2..=30,
        width: 1..=3,
        planted: false,
    };
    let r = order_independence(&cfg, ORDER_INSTANCES, ORDER_CAP);
    outcome(
        r.instances == ORDER_INSTANCES && r.mismatches.is_empty(),
        format!(
            "{} instances ({} scanned), {} orders, {} mismatches",
            r.instances,
            r.scanned,
            r.permutations,
            r.mismatches.len()
        ),
    )
}

fn input_length(fuzz: &[CnfFormula]) -> Outcome {
    let mut checked = 0usize;
    let mut bad = 0usize;
    let mut check = |f: &CnfFormula| {
        let m = f.to_matrix();
        let (stripped, _) = m.without_unused_columns();
        if stripped.clauses() == 0 {
            return;
        }
        checked += 1;
        let pair = stripped.to_decomposition().expect("encodes");
        if pair.input_length() != m.nonzero_count() || m.nonzero_count() != f.literal_count() {
            bad += 1;
        }
    };
    for_each_small_formula(3, 4, 3, |f| check(&f));
    fuzz.iter().for_each(&mut check);
    outcome(bad == 0, format!("{checked} inputs, {bad} mismatches"))
}

fn json_without_timing(out: &[u8]) -> String {
    String::from_utf8_lossy(out)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"elapsed_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("planted.cnf");
    std::fs::write(&big, dimacs::emit(&probe::instance(3_000, 5, 0))).unwrap();
    let mut files: Vec<PathBuf> = ["e1.cnf", "e2.cnf", "e3.cnf"].iter().map(|n| fixtures().join(n)).collect();
    files.push(big);
    let mut differing = Vec::new();
    for file in &files {
        let mut seen: Option<String> = None;
        for _ in 0..DETERMINISM_RUNS {
            let out = Command::new(env!("CARGO_BIN_EXE_covsat"))
                .args(["solve", "--json", "--count-ops"])
                .arg(file)
                .output()
                .unwrap();
            let body = json_without_timing(&out.stdout);
            match &seen {
                None => seen = Some(body),
                Some(s) if *s != body => differing.push(file.display().to_string()),
                Some(_) => {}
            }
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} files x {} runs, {} differing", files.len(), DETERMINISM_RUNS, differing.len()),
    )
}

fn probe_table() -> Outcome {
    let start = Instant::now();
    let r = probe::run(&PROBE_SIZES, 1);
    let t = start.elapsed();
    let table = r.probe.as_ref().unwrap();
    for row in &table.rows {
        println!(
            "    N={:<7} vars={:<6} clauses={:<6} op_total={:<10} ratio={:.3e} {}",
            row.n,
            row.vars,
            row.clauses,
            row.op_total,
            row.op_total as f64 / (row.n as f64).powi(3),
            row.verdict
        );
    }
    let complete = table.rows.len() == PROBE_SIZES.len() && table.fitted_exponent.is_some();
    outcome(
        complete && t < PROBE_BUDGET,
        format!(
            "fitted exponent {:.3}, max op_total/N^3 {:.3e}, {} of {} planted instances answered UNSAT, {:.1?}",
            table.fitted_exponent.unwrap_or(f64::NAN),
            table.max_ratio,
            r.disagreements.len(),
            table.rows.len(),
            t
        ),
    )
}

fn differential(exhaustive: &DifferentialReport, fuzz: &DifferentialReport) -> Outcome {
    let mut broken = 0usize;
    let mut total = 0usize;
    for r in [exhaustive, fuzz] {
        if serde_json::to_string(r).is_err() || !r.is_consistent() {
            broken += 1;
        }
        for d in &r.disagreements {
            total += 1;
            let Ok((f, _)) = dimacs::parse(&d.minimized) else {
                broken += 1;
                continue;
            };
            let engine = match solve_sat(&f, &SolverConfig::default()).verdict {
                SatVerdict::Sat { .. } => Answer::Sat,
                SatVerdict::Unsat { .. } => Answer::Unsat,
                SatVerdict::EngineError { .. } => Answer::Unknown,
            };
            let oracle = oracle_answer(&f);
            let small = f.literal_count() <= dimacs::parse(&d.instance).unwrap().0.literal_count();
            if !(d.minimized_reproduces && engine != oracle && engine != Answer::Unknown && small) {
                broken += 1;
            }
        }
    }
    let rate = |r: &DifferentialReport| 100.0 * r.disagreements.len() as f64 / r.total.max(1) as f64;
    outcome(
        broken == 0,
        format!(
            "exhaustive {}/{} disagree ({:.2}%), fuzz {}/{} disagree ({:.2}%), {} counterexamples, {} not reproducing",
            exhaustive.disagreements.len(),
            exhaustive.total,
            rate(exhaustive),
            fuzz.disagreements.len(),
            fuzz.total,
            rate(fuzz),
            total,
            broken
        ),
    )
}

fn round_trip() -> Outcome {
    let cfg = FuzzConfig {
        seed: 99,
        count: ROUND_TRIPS as usize,
        vars: 1..=40,
        clauses: 0..=60,
        width: 1..=6,
        planted: false,
    };
    let mut bad = 0;
    for i in 0..ROUND_TRIPS {
        let f = random_cnf(&cfg, i);
        let raw = raw_dimacs(&f);
        let (a, _) = dimacs::parse(&raw).unwrap();
        let once = dimacs::emit(&a);
        let (b, _) = dimacs::parse(&once).unwrap();
        if dimacs::emit(&b) != once || a.canonical_clauses() != b.canonical_clauses() {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{ROUND_TRIPS} instances, {bad} not fixpoints"))
}

/// Generator output written as-is, without canonical ordering.
fn raw_dimacs(f: &CnfFormula) -> String {
    let mut s = format!("c raw\np cnf {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        for l in c {
            s.push_str(&format!("{l} "));
        }
        s.push_str("0\n");
    }
    s
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |id, name, o: Outcome| {
        println!("[{}] {id:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((id, name, o));
    };

    report(1, "reduction equivalence", reduction());

    let start = Instant::now();
    let exhaustive = exhaustive_differential(3, 4, 3);
    let fuzz = fuzz_instances();
    let mut c = Collector::new("fuzz");
    for (i, f) in fuzz.iter().enumerate() {
        c.check(format!("seed={} index={i}", fuzz_config().seed), f, None);
    }
    let fuzz_report = c.finish();
    let t = start.elapsed();

    report(2, "soundness gate", soundness(&exhaustive, &fuzz_report, t));
    report(3, "worked fixtures", worked_fixtures());
    report(4, "structural invariants", structural(&fuzz, &[&exhaustive, &fuzz_report]));
    report(5, "cleaning order independence", order());
    report(6, "input length equality", input_length(&fuzz));
    report(7, "determinism", determinism());
    report(8, "complexity probe", probe_table());
    report(9, "differential reports", differential(&exhaustive, &fuzz_report));
    report(10, "dimacs round trip", round_trip());

    let failed: Vec<_> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
