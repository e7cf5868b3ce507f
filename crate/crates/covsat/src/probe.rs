//! Operation-count growth on planted random 3-SAT near the threshold.

use covsat_core::CnfFormula;

use crate::generate::{random_cnf, FuzzConfig};
use crate::harness::{describe, fit_exponent, Answer, Collector, DifferentialReport, ProbeRow, ProbeTable};

/// Clause-to-variable ratio of the probe instances.
pub const RATIO: f64 = 4.26;

/// Variables and clauses for an instance of about `target` literals.
pub fn shape(target: usize) -> (usize, usize) {
    let m = ((target as f64 / 3.0).round() as usize).max(1);
    let n = ((m as f64 / RATIO).round() as usize).max(3);
    (n, m)
}

pub fn instance(target: usize, seed: u64, index: u64) -> CnfFormula {
    let (n, m) = shape(target);
    let cfg = FuzzConfig {
        seed,
        count: 1,
        vars: n..=n,
        clauses: m..=m,
        width: 3..=3,
        planted: true,
    };
    random_cnf(&cfg, index)
}

/// Solves one planted instance per target size with operation counting on.
/// The instances are satisfiable by construction, so every UNSAT verdict
/// is recorded as a disagreement.
pub fn run(sizes: &[usize], seed: u64) -> DifferentialReport {
    let mut c = Collector::new("probe").shrink_limit(2_000);
    let mut table = ProbeTable::default();
    for (k, &target) in sizes.iter().enumerate() {
        let f = instance(target, seed, k as u64);
        let out = c.check(format!("probe seed={seed} target={target}"), &f, Some(Answer::Sat));
        table.rows.push(ProbeRow {
            target,
            vars: f.num_vars,
            clauses: f.clauses.len(),
            n: f.literal_count(),
            op_total: out.run.ops.total(),
            verdict: describe(&out.run.verdict),
            elapsed_ms: out.elapsed_ms,
        });
    }
    let points: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.n as f64, r.op_total as f64)).collect();
    table.fitted_exponent = fit_exponent(&points);
    table.max_ratio = table
        .rows
        .iter()
        .map(|r| r.op_total as f64 / (r.n as f64).powi(3))
        .fold(0.0, f64::max);
    c.set_probe(table);
    c.finish()
}
