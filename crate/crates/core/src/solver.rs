//! End-to-end drivers: covering search over a decomposition and
//! satisfiability over a CNF formula.
//!
//! Both drivers gate their positive answers. A swap set is returned only
//! after the swapped α matrix has been checked to cover every column, and
//! an assignment only after it has been evaluated against the formula. A
//! failed gate surfaces as an engine fault, never as a verdict.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cnf::{evaluate, Assignment, CnfFormula};
use crate::decomposition::{DecompositionPair, SwapSet};
use crate::graph::{
    both_sides_blocked, construct, find_main_vertices, InvariantViolation, MainVertices,
    PointingGraph,
};
use crate::ops::{Event, Meter, OpCounter, Trace};
use crate::procedures::{
    clean, eliminate_incompatibilities, extend, live_swap_set, CleanOutcome, EliminationOutcome,
};

/// Which literal polarity forms the α side of the encoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Orientation {
    /// α holds the clauses with negative literals.
    #[default]
    NegativeAlpha,
    PositiveAlpha,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverConfig {
    pub count_ops: bool,
    pub trace: bool,
    pub orientation: Orientation,
    /// Reject early when some row blocks a column on both sides.
    pub shortcut: bool,
    /// Check the structural invariants after every phase.
    pub check_invariants: bool,
}

/// Why no covering exists. Indices are 0-based; [`Reason::index`] gives
/// the 1-based form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    NonRemovableUselessVertex { vertex: usize },
    /// No row holds the column on its ᾱ side.
    UnreachableColumn { column: usize },
    BothComponentsSingle { row: usize },
    EmptyClause,
    /// The column's ᾱ-rows are all in the graph already and none of the
    /// vertices swapping it out is removable.
    IncompatibilityNotEliminated { column: usize },
}

impl Reason {
    pub fn kind(&self) -> &'static str {
        match self {
            Reason::NonRemovableUselessVertex { .. } => "non-removable-useless-vertex",
            Reason::UnreachableColumn { .. } => "unreachable-column",
            Reason::BothComponentsSingle { .. } => "both-components-single",
            Reason::EmptyClause => "empty-clause",
            Reason::IncompatibilityNotEliminated { .. } => "incompatibility-not-eliminated",
        }
    }

    pub fn index(&self) -> Option<usize> {
        match *self {
            Reason::NonRemovableUselessVertex { vertex: i }
            | Reason::UnreachableColumn { column: i }
            | Reason::BothComponentsSingle { row: i }
            | Reason::IncompatibilityNotEliminated { column: i } => Some(i + 1),
            Reason::EmptyClause => None,
        }
    }

    fn map_rows(self, f: impl Fn(usize) -> usize) -> Self {
        match self {
            Reason::NonRemovableUselessVertex { vertex } => {
                Reason::NonRemovableUselessVertex { vertex: f(vertex) }
            }
            Reason::BothComponentsSingle { row } => Reason::BothComponentsSingle { row: f(row) },
            r => r,
        }
    }

    fn map_columns(self, f: impl Fn(usize) -> usize) -> Self {
        match self {
            Reason::UnreachableColumn { column } => Reason::UnreachableColumn { column: f(column) },
            Reason::IncompatibilityNotEliminated { column } => {
                Reason::IncompatibilityNotEliminated { column: f(column) }
            }
            r => r,
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(i) => write!(f, "{} {}", self.kind(), i),
            None => f.write_str(self.kind()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    CoveringFound { swaps: SwapSet },
    NoCovering { reason: Reason },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineFault {
    #[error("swap set {swaps:?} does not cover column {column}")]
    GateFailed { swaps: Vec<usize>, column: usize },
    #[error("{extensions} extensions exceed the bound {bound}")]
    LoopBound { extensions: usize, bound: usize },
    #[error("invariant violated: {0}")]
    Invariant(InvariantViolation),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub extensions: usize,
    pub vertices_formed: usize,
    pub edges_formed: usize,
    pub vertices_removed: usize,
    pub max_examinations: u32,
}

#[derive(Debug, Clone)]
pub struct CoveringRun {
    pub verdict: Result<Verdict, EngineFault>,
    pub ops: OpCounter,
    pub trace: Trace,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatVerdict {
    Sat { assignment: Assignment },
    Unsat { reason: Reason },
    EngineError { detail: String },
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Sat { .. })
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatVerdict::Unsat { .. })
    }
}

#[derive(Debug, Clone)]
pub struct SatRun {
    pub verdict: SatVerdict,
    pub ops: OpCounter,
    pub trace: Trace,
    pub stats: RunStats,
}

fn stats_of(g: &PointingGraph) -> RunStats {
    RunStats {
        extensions: g.extensions() as usize,
        vertices_formed: g.vertex_order().len(),
        edges_formed: g.created_edge_count(),
        vertices_removed: (0..g.n()).filter(|&v| g.is_removed(v)).count(),
        max_examinations: (0..g.n()).map(|v| g.examinations(v)).max().unwrap_or(0),
    }
}

/// Searches for a covering of `pair`, which must be a valid decomposition.
pub fn solve_covering(pair: &DecompositionPair, config: &SolverConfig) -> CoveringRun {
    let mut meter = Meter::new(config.count_ops, config.trace);
    let (verdict, stats) = run_covering(pair, config, &mut meter);
    CoveringRun {
        verdict,
        ops: meter.ops,
        trace: meter.trace,
        stats,
    }
}

fn gate(pair: &DecompositionPair, swaps: SwapSet) -> Result<Verdict, EngineFault> {
    let swapped = pair.apply_swaps(&swaps).expect("swap rows are in range");
    match swapped.column_counts().alpha.iter().position(|&c| c == 0) {
        None => Ok(Verdict::CoveringFound { swaps }),
        Some(j) => Err(EngineFault::GateFailed {
            swaps: swaps.to_one_based(),
            column: j + 1,
        }),
    }
}

fn run_covering(
    pair: &DecompositionPair,
    config: &SolverConfig,
    meter: &mut Meter,
) -> (Result<Verdict, EngineFault>, RunStats) {
    if config.shortcut {
        let counts = pair.column_counts();
        if let Some(row) = (0..pair.n()).find(|&i| both_sides_blocked(pair, &counts, i)) {
            meter.emit(Event::Shortcut { row });
            let reason = Reason::BothComponentsSingle { row };
            return (Ok(Verdict::NoCovering { reason }), RunStats::default());
        }
    }

    let mut g = match find_main_vertices(pair, meter) {
        MainVertices::CoveringAlready => {
            return (gate(pair, SwapSet::default()), RunStats::default());
        }
        MainVertices::Graph(g) => g,
    };

    let check = |g: &PointingGraph| -> Result<(), EngineFault> {
        if config.check_invariants {
            g.check_invariants().map_err(EngineFault::Invariant)
        } else {
            Ok(())
        }
    };

    let bound = pair.n();
    let verdict = loop {
        construct(&mut g, pair, meter);
        if let Err(e) = check(&g) {
            break Err(e);
        }
        if let CleanOutcome::NotCleanable { vertex } = clean(&mut g, meter) {
            let reason = Reason::NonRemovableUselessVertex { vertex };
            break Ok(Verdict::NoCovering { reason });
        }
        if let Err(e) = check(&g) {
            break Err(e);
        }
        match eliminate_incompatibilities(&mut g, pair, meter) {
            EliminationOutcome::Eliminated => {
                break check(&g).and_then(|()| gate(pair, live_swap_set(&g)));
            }
            EliminationOutcome::Unreachable { column } => {
                let reason = if pair.alpha_bar_col(column).is_empty() {
                    Reason::UnreachableColumn { column }
                } else {
                    Reason::IncompatibilityNotEliminated { column }
                };
                break Ok(Verdict::NoCovering { reason });
            }
            EliminationOutcome::NeedsExtension(plan) => {
                if g.extensions() as usize >= bound {
                    break Err(EngineFault::LoopBound {
                        extensions: g.extensions() as usize + 1,
                        bound,
                    });
                }
                extend(&mut g, pair, &plan, meter);
            }
        }
    };
    (verdict, stats_of(&g))
}

/// Decides satisfiability of `f` through its covering encoding.
pub fn solve_sat(f: &CnfFormula, config: &SolverConfig) -> SatRun {
    let empty = |verdict| SatRun {
        verdict,
        ops: OpCounter::new(config.count_ops),
        trace: Trace::new(config.trace),
        stats: RunStats::default(),
    };
    if f.has_empty_clause {
        return empty(SatVerdict::Unsat {
            reason: Reason::EmptyClause,
        });
    }
    if f.clauses.is_empty() {
        return empty(SatVerdict::Sat {
            assignment: Assignment::all_false(f.num_vars),
        });
    }

    let (cm, kept) = f.to_matrix().without_unused_columns();
    let pair = match cm.to_decomposition() {
        Ok(p) => p,
        Err(e) => {
            return empty(SatVerdict::EngineError {
                detail: format!("encoding failed: {e}"),
            })
        }
    };
    let pair = match config.orientation {
        Orientation::NegativeAlpha => pair,
        Orientation::PositiveAlpha => pair.mirrored(),
    };

    let run = solve_covering(&pair, config);
    let verdict = match run.verdict {
        Ok(Verdict::CoveringFound { swaps }) => {
            let mut a = Assignment::all_false(f.num_vars);
            for (row, &var) in kept.iter().enumerate() {
                let swapped = swaps.contains(row);
                a.values[var] = match config.orientation {
                    Orientation::NegativeAlpha => swapped,
                    Orientation::PositiveAlpha => !swapped,
                };
            }
            if evaluate(f, &a) {
                SatVerdict::Sat { assignment: a }
            } else {
                SatVerdict::EngineError {
                    detail: format!(
                        "assignment from swap set {:?} does not satisfy the formula",
                        swaps.to_one_based()
                    ),
                }
            }
        }
        Ok(Verdict::NoCovering { reason }) => SatVerdict::Unsat {
            reason: reason
                .map_rows(|r| kept[r])
                .map_columns(|c| f.origin[c] - 1),
        },
        Err(fault) => SatVerdict::EngineError {
            detail: format!("{fault}"),
        },
    };
    SatRun {
        verdict,
        ops: run.ops,
        trace: run.trace,
        stats: run.stats,
    }
}
