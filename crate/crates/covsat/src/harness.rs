//! Differential testing of the engine against the oracles.
//!
//! Engine/oracle disagreements are findings: they are archived with a
//! shrunken DIMACS reproduction but do not make a run fail. Only gate
//! violations (an emitted SAT assignment that does not satisfy its formula)
//! and structural invariant violations do.

use covsat_core::cnf::evaluate;
use covsat_core::graph::{construct, find_main_vertices};
use covsat_core::procedures::{clean_in_order, removal_procedure};
use covsat_core::solver::solve_sat;
use covsat_core::{
    CleanOutcome, CnfFormula, EdgeKind, MainVertices, Meter, PointingGraph, SatRun, SatVerdict,
    SolverConfig, StateSnapshot,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

use crate::dimacs;
use crate::generate::{for_each_small_formula, random_cnf, FuzzConfig};
use crate::oracle::{brute_covering, brute_sat, dpll, DpllOutcome, BRUTE_LIMIT};

/// Steps allowed to the DPLL oracle per instance.
pub const DPLL_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answer {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub id: String,
    pub instance: String,
    pub engine: String,
    pub oracle: Answer,
    pub minimized: String,
    /// The minimized instance was re-run and still disagrees.
    pub minimized_reproduces: bool,
    /// False when the instance was too large to shrink.
    pub shrunk: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    EngineError,
    GateViolation,
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateFailure {
    pub id: String,
    pub kind: FailureKind,
    pub detail: String,
    pub instance: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OpStats {
    pub samples: usize,
    pub max_ratio: f64,
    pub max_ratio_n: usize,
    /// Least-squares slope of ln(ops) against ln(N).
    pub fitted_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub target: usize,
    pub vars: usize,
    pub clauses: usize,
    pub n: usize,
    pub op_total: u64,
    pub verdict: String,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
    pub fitted_exponent: Option<f64>,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DifferentialReport {
    pub source: String,
    /// Instances with a known oracle answer.
    pub total: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub gate_failures: Vec<GateFailure>,
    pub gate_violations: usize,
    pub invariant_violations: usize,
    pub oracle_unknown: usize,
    pub engine_sat: usize,
    pub engine_unsat: usize,
    pub oracle_sat: usize,
    pub oracle_unsat: usize,
    pub op_stats: OpStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeTable>,
}

impl DifferentialReport {
    pub fn new(source: &str) -> Self {
        DifferentialReport {
            source: source.to_string(),
            ..Self::default()
        }
    }

    /// Gate and invariant violations; a nonzero value fails the run.
    pub fn violations(&self) -> usize {
        self.gate_violations + self.invariant_violations
    }

    pub fn is_consistent(&self) -> bool {
        self.agreements + self.disagreements.len() + self.gate_failures.len() == self.total
    }
}

/// Least-squares slope of `ln y` over `ln x`; `None` without two distinct
/// `x` values.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if pts.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn engine_config() -> SolverConfig {
    SolverConfig {
        count_ops: true,
        check_invariants: true,
        ..SolverConfig::default()
    }
}

pub fn oracle_answer(f: &CnfFormula) -> Answer {
    if f.num_vars <= BRUTE_LIMIT {
        match brute_sat(f) {
            Ok(Some(_)) => Answer::Sat,
            Ok(None) => Answer::Unsat,
            Err(_) => Answer::Unknown,
        }
    } else {
        match dpll(f, DPLL_BUDGET) {
            DpllOutcome::Sat(_) => Answer::Sat,
            DpllOutcome::Unsat => Answer::Unsat,
            DpllOutcome::Unknown => Answer::Unknown,
        }
    }
}

/// One-line summary of an engine verdict.
pub fn describe(v: &SatVerdict) -> String {
    match v {
        SatVerdict::Sat { .. } => "SAT".to_string(),
        SatVerdict::Unsat { reason } => format!("UNSAT {reason}"),
        SatVerdict::EngineError { detail } => format!("ERROR {detail}"),
    }
}

fn engine_answer(f: &CnfFormula) -> Answer {
    match solve_sat(f, &SolverConfig::default()).verdict {
        SatVerdict::Sat { .. } => Answer::Sat,
        SatVerdict::Unsat { .. } => Answer::Unsat,
        SatVerdict::EngineError { .. } => Answer::Unknown,
    }
}

fn disagrees(f: &CnfFormula) -> bool {
    let e = engine_answer(f);
    e != Answer::Unknown && {
        let o = oracle_answer(f);
        o != Answer::Unknown && o != e
    }
}

/// Greedy shrinking that keeps the disagreement: drop clauses, then drop
/// literals, then renumber the remaining variables densely. `budget` caps
/// the number of re-checks.
pub fn shrink(f: &CnfFormula, mut budget: usize) -> CnfFormula {
    let mut cur = f.clone();
    let mut try_keep = |cand: CnfFormula, cur: &mut CnfFormula| -> bool {
        if budget == 0 {
            return false;
        }
        budget -= 1;
        if disagrees(&cand) {
            *cur = cand;
            true
        } else {
            false
        }
    };

    let mut i = 0;
    while i < cur.clauses.len() {
        let mut cand = cur.clone();
        cand.clauses.remove(i);
        cand.origin.remove(i);
        if !try_keep(cand, &mut cur) {
            i += 1;
        }
    }
    for ci in 0..cur.clauses.len() {
        let mut k = 0;
        while k < cur.clauses[ci].len() && cur.clauses[ci].len() > 1 {
            let mut cand = cur.clone();
            cand.clauses[ci].remove(k);
            if !try_keep(cand, &mut cur) {
                k += 1;
            }
        }
    }
    renumber(&cur)
}

/// Renames the used variables to 1..=k in order of first use by index.
pub fn renumber(f: &CnfFormula) -> CnfFormula {
    let mut map = vec![0i32; f.num_vars + 1];
    let mut used: Vec<usize> = f
        .clauses
        .iter()
        .flatten()
        .map(|l| l.unsigned_abs() as usize)
        .collect();
    used.sort_unstable();
    used.dedup();
    for (k, &v) in used.iter().enumerate() {
        map[v] = k as i32 + 1;
    }
    let clauses = f
        .clauses
        .iter()
        .map(|c| c.iter().map(|&l| i64::from(map[l.unsigned_abs() as usize] * l.signum())).collect())
        .collect();
    let mut g = CnfFormula::new(used.len(), clauses).expect("renamed literals are in range");
    g.has_empty_clause = f.has_empty_clause;
    g
}

pub struct Checked {
    pub run: SatRun,
    pub elapsed_ms: u128,
}

/// Accumulates one instance's outcome into a report.
pub struct Collector {
    report: DifferentialReport,
    points: Vec<(f64, f64)>,
    shrink_budget: usize,
    shrink_limit_n: usize,
}

impl Collector {
    pub fn new(source: &str) -> Self {
        Collector {
            report: DifferentialReport::new(source),
            points: Vec::new(),
            shrink_budget: 5_000,
            shrink_limit_n: 20_000,
        }
    }

    /// Instances with more than `n` literals are archived unshrunk.
    pub fn shrink_limit(mut self, n: usize) -> Self {
        self.shrink_limit_n = n;
        self
    }

    pub fn set_probe(&mut self, table: ProbeTable) {
        self.report.probe = Some(table);
    }

    /// Runs the engine on `f` and compares with `oracle` (computed on
    /// demand when `None`).
    pub fn check(&mut self, id: String, f: &CnfFormula, oracle: Option<Answer>) -> Checked {
        let start = Instant::now();
        let run = solve_sat(f, &engine_config());
        let elapsed_ms = start.elapsed().as_millis();
        let done = |run| Checked { run, elapsed_ms };
        let r = &mut self.report;
        let fail = |kind, detail: String| GateFailure {
            id: id.clone(),
            kind,
            detail,
            instance: dimacs::emit(f),
        };
        let engine = match &run.verdict {
            SatVerdict::Sat { assignment } => {
                if !evaluate(f, assignment) {
                    r.gate_violations += 1;
                    r.total += 1;
                    r.gate_failures
                        .push(fail(FailureKind::GateViolation, "assignment fails evaluation".into()));
                    return done(run);
                }
                Answer::Sat
            }
            SatVerdict::Unsat { .. } => Answer::Unsat,
            SatVerdict::EngineError { detail } => {
                let kind = if detail.contains("invariant") {
                    r.invariant_violations += 1;
                    FailureKind::Invariant
                } else {
                    FailureKind::EngineError
                };
                r.total += 1;
                r.gate_failures.push(fail(kind, detail.clone()));
                return done(run);
            }
        };

        let n = f.literal_count();
        if n > 0 {
            let ops = run.ops.total() as f64;
            self.points.push((n as f64, ops));
            let ratio = ops / (n as f64).powi(3);
            if ratio > r.op_stats.max_ratio {
                r.op_stats.max_ratio = ratio;
                r.op_stats.max_ratio_n = n;
            }
        }

        let oracle = oracle.unwrap_or_else(|| oracle_answer(f));
        match oracle {
            Answer::Unknown => {
                r.oracle_unknown += 1;
                return done(run);
            }
            Answer::Sat => r.oracle_sat += 1,
            Answer::Unsat => r.oracle_unsat += 1,
        }
        match engine {
            Answer::Sat => r.engine_sat += 1,
            _ => r.engine_unsat += 1,
        }
        r.total += 1;
        if engine == oracle {
            r.agreements += 1;
        } else {
            let shrunk = n <= self.shrink_limit_n;
            let minimized = if shrunk { shrink(f, self.shrink_budget) } else { f.clone() };
            self.report.disagreements.push(Disagreement {
                id,
                instance: dimacs::emit(f),
                engine: describe(&run.verdict),
                oracle,
                minimized_reproduces: disagrees(&minimized),
                minimized: dimacs::emit(&minimized),
                shrunk,
            });
        }
        done(run)
    }

    pub fn finish(mut self) -> DifferentialReport {
        self.report.op_stats.samples = self.points.len();
        self.report.op_stats.fitted_exponent = fit_exponent(&self.points);
        self.report
    }
}

/// Differential run over `cfg.count` generated instances.
pub fn differential_run(cfg: &FuzzConfig) -> DifferentialReport {
    let mut c = Collector::new("fuzz");
    for i in 0..cfg.count as u64 {
        let f = random_cnf(cfg, i);
        let oracle = if cfg.planted { Some(Answer::Sat) } else { None };
        c.check(format!("seed={} index={}", cfg.seed, i), &f, oracle);
    }
    c.finish()
}

/// Differential run over every formula of the exhaustive small space.
pub fn exhaustive_differential(max_n: usize, max_m: usize, max_width: usize) -> DifferentialReport {
    let mut c = Collector::new("exhaustive");
    let mut k = 0usize;
    for_each_small_formula(max_n, max_m, max_width, |f| {
        k += 1;
        c.check(format!("exhaustive #{k}"), &f, None);
    });
    c.finish()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReductionReport {
    pub formulas: usize,
    /// DIMACS of every formula where the two oracles differ.
    pub mismatches: Vec<String>,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares `brute_sat(f)` with `brute_covering` of the encoding of `f`
/// for every formula in the bounded space.
pub fn exhaustive_reduction_check(max_n: usize, max_m: usize, max_width: usize) -> ReductionReport {
    let mut rep = ReductionReport::default();
    for_each_small_formula(max_n, max_m, max_width, |f| {
        rep.formulas += 1;
        if reduction_mismatch(&f) {
            rep.mismatches.push(dimacs::emit(&f));
        }
    });
    rep
}

/// True when satisfiability and covering existence of the encoding differ.
pub fn reduction_mismatch(f: &CnfFormula) -> bool {
    let sat = brute_sat(f).expect("small formula").is_some();
    let cover = if f.has_empty_clause {
        false
    } else {
        let (cm, _) = f.to_matrix().without_unused_columns();
        if cm.clauses() == 0 {
            true
        } else {
            let p = cm.to_decomposition().expect("stripped matrix encodes");
            brute_covering(&p).expect("small decomposition").is_some()
        }
    };
    sat != cover
}

fn graph_of(f: &CnfFormula) -> Option<(covsat_core::DecompositionPair, PointingGraph)> {
    if f.has_empty_clause || f.clauses.is_empty() {
        return None;
    }
    let (cm, _) = f.to_matrix().without_unused_columns();
    let p = cm.to_decomposition().ok()?;
    match find_main_vertices(&p, &mut Meter::off()) {
        MainVertices::Graph(mut g) => {
            construct(&mut g, &p, &mut Meter::off());
            Some((p, g))
        }
        MainVertices::CoveringAlready => None,
    }
}

/// Structural checks on one instance: a full solve with invariant checks
/// and the extension bound, plus exact snapshot/restore around a removal
/// from each of the first few live vertices of the constructed graph.
pub fn structural_check(f: &CnfFormula) -> Result<(), String> {
    let run = solve_sat(f, &engine_config());
    if let SatVerdict::EngineError { detail } = &run.verdict {
        if detail.contains("invariant") {
            return Err(detail.clone());
        }
    }
    if run.stats.extensions > f.num_vars {
        return Err(format!("{} extensions for {} variables", run.stats.extensions, f.num_vars));
    }
    let Some((_, mut g)) = graph_of(f) else {
        return Ok(());
    };
    g.check_invariants().map_err(|e| e.to_string())?;
    for v in g.live_vertices().into_iter().take(8) {
        let snap = StateSnapshot::capture(&g);
        let out = removal_procedure(&mut g, v, &mut Meter::off());
        let mut seen = out.removed_vertices.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != out.removed_vertices.len() {
            return Err(format!("removal from v{} removed a vertex twice", v + 1));
        }
        if out.removable {
            g.check_invariants().map_err(|e| e.to_string())?;
        }
        snap.restore(&mut g);
        if StateSnapshot::capture(&g) != snap {
            return Err(format!("restore after removal from v{} is not exact", v + 1));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OrderReport {
    pub scanned: usize,
    pub instances: usize,
    pub permutations: usize,
    pub mismatches: Vec<String>,
}

type CleanResult = (bool, Vec<usize>, Vec<(usize, usize, usize, bool)>);

fn clean_result(g: &PointingGraph, out: CleanOutcome) -> CleanResult {
    let mut edges: Vec<_> = g
        .live_edges()
        .map(|e| (e.from, e.to, e.label.column, e.label.kind == EdgeKind::Conjunctive))
        .collect();
    edges.sort_unstable();
    match out {
        CleanOutcome::Clean => (true, g.live_vertices(), edges),
        CleanOutcome::NotCleanable { .. } => (false, Vec::new(), Vec::new()),
    }
}

/// Cleans graphs with at least two useless vertices under up to `cap`
/// orders of those vertices and compares the cleaned graphs. Scans
/// instances of `cfg` until `wanted` qualifying graphs were found.
pub fn order_independence(cfg: &FuzzConfig, wanted: usize, cap: usize) -> OrderReport {
    let mut rep = OrderReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut index = 0u64;
    while rep.instances < wanted && rep.scanned < wanted * 1000 {
        let f = random_cnf(cfg, index);
        index += 1;
        rep.scanned += 1;
        let Some((_, g)) = graph_of(&f) else { continue };
        let useless = g.live_useless();
        if useless.len() < 2 {
            continue;
        }
        rep.instances += 1;
        let mut orders = permutations(&useless, cap, &mut rng);
        orders.dedup();
        let mut first: Option<CleanResult> = None;
        for order in orders {
            rep.permutations += 1;
            let mut h = g.clone();
            let out = clean_in_order(&mut h, &order, &mut Meter::off());
            let res = clean_result(&h, out);
            match &first {
                None => first = Some(res),
                Some(r) if *r != res => {
                    rep.mismatches.push(format!(
                        "seed={} index={} order={:?}\n{}",
                        cfg.seed,
                        index - 1,
                        order.iter().map(|v| v + 1).collect::<Vec<_>>(),
                        dimacs::emit(&f)
                    ));
                    break;
                }
                Some(_) => {}
            }
        }
    }
    rep
}

/// All orders of `xs` when there are at most `cap` of them, otherwise the
/// identity, the reverse and seeded shuffles up to `cap`.
fn permutations(xs: &[usize], cap: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    fn all(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            all(prefix, rest, out, cap);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let fact: usize = (1..=xs.len()).try_fold(1usize, |a, b| a.checked_mul(b)).unwrap_or(usize::MAX);
    if fact <= cap {
        let mut out = Vec::new();
        all(&mut Vec::new(), &mut xs.to_vec(), &mut out, cap);
        return out;
    }
    let mut out = vec![xs.to_vec(), xs.iter().rev().copied().collect()];
    while out.len() < cap {
        let mut p = xs.to_vec();
        p.shuffle(rng);
        out.push(p);
    }
    out
}
