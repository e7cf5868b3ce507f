//! Special-covering search over paired decompositions of a finite set.
//!
//! A [`DecompositionPair`] holds `n` ordered pairs of disjoint subsets of an
//! `m`-element set as two `n × m` bit matrices (the α side and the ᾱ side).
//! A covering picks one component of every pair so that the chosen subsets
//! jointly cover the set. [`solver::solve_covering`] searches for one by
//! building a pointing graph of row swaps, pruning it with the removal and
//! cleaning procedures, and resolving incompatible vertex sets, extending the
//! graph when needed.
//!
//! The [`cnf`] module maps a CNF formula onto a decomposition of its clause
//! set (one pair per variable), so [`solver::solve_sat`] decides
//! satisfiability with the same machinery and returns an assignment that has
//! been re-checked against the formula.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, oracles, the
//! differential harness and the command line live in the `covsat` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bits;
pub mod cnf;
pub mod decomposition;
pub mod graph;
pub mod ops;
pub mod procedures;
pub mod solver;

pub use cnf::{Assignment, CnfError, CnfFormula, CnfMatrix, PreprocessReport};
pub use decomposition::{
    ColumnCounts, DecompositionError, DecompositionPair, SwapSet, ValidationReport, Violation,
};
pub use graph::{
    ConstructOutcome, Edge, EdgeKind, EdgeLabel, InvariantViolation, MainVertices, PointingGraph,
};
pub use ops::{Event, Meter, OpCounter, OpKind, Trace, TraceEvent};
pub use procedures::{
    CleanOutcome, EliminationOutcome, ExtensionPlan, IncompatibleSet, RemovalOutcome,
    StateSnapshot,
};
pub use solver::{
    CoveringRun, EngineFault, Orientation, Reason, RunStats, SatRun, SatVerdict, SolverConfig,
    Verdict,
};
