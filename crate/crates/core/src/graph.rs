//! The pointing graph: main vertices, vertex/edge construction and the
//! mutable bookkeeping the removal and compatibility procedures work on.
//!
//! Vertex `i` stands for the replacement step that swaps pair `i`. Edges are
//! kept in one arena with per-vertex in/out lists; the dense views
//! (`graph_edges`, `edge_in`, `dis_edges`) are derived from it on demand.
//!
//! Singleness is always judged against the column counts of the input
//! decomposition. Since every column that makes a row single has exactly one
//! α-row, each column labels edges from at most one source, so the live
//! disjunctive count per (source, column) is stored per column.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::decomposition::{ColumnCounts, DecompositionPair};
use crate::ops::{Event, Meter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Conjunctive,
    Disjunctive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeLabel {
    pub kind: EdgeKind,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: EdgeLabel,
}

/// Result of the main-vertex search.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum MainVertices {
    /// The α matrix has no zero column.
    CoveringAlready,
    Graph(PointingGraph),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructOutcome {
    NoNewVertices,
    Extended,
}

/// A broken structural invariant. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantViolation {
    EdgeBound { edges: usize, bound: usize },
    Indegree { vertex: usize, expected: usize, found: usize },
    DeadEndpoint { from: usize, to: usize },
    Examinations { vertex: usize, count: u32, bound: u32 },
    DoubleRemoval { vertex: usize },
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InvariantViolation::EdgeBound { edges, bound } => {
                write!(f, "{edges} edges exceed the bound {bound}")
            }
            InvariantViolation::Indegree {
                vertex,
                expected,
                found,
            } => write!(f, "indegree of v{vertex} is {found}, expected {expected}"),
            InvariantViolation::DeadEndpoint { from, to } => {
                write!(f, "live edge v{from} -> v{to} touches a removed vertex")
            }
            InvariantViolation::Examinations {
                vertex,
                count,
                bound,
            } => write!(f, "v{vertex} examined {count} times, bound {bound}"),
            InvariantViolation::DoubleRemoval { vertex } => {
                write!(f, "v{vertex} removed twice")
            }
        }
    }
}

/// Every piece of graph state the removal procedure can change, plus the
/// construction state. Cloning it is a full snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct GraphState {
    pub order: Vec<usize>,
    pub formed: Vec<bool>,
    pub removed: Vec<bool>,
    pub main: Vec<bool>,
    pub assoc: Vec<Vec<usize>>,
    pub useless: Vec<bool>,
    pub examined: Vec<bool>,
    pub is_final: Vec<bool>,
    pub ind: Vec<usize>,
    pub multiplicity: Vec<usize>,
    pub edges: Vec<Edge>,
    pub live: Vec<bool>,
    pub out_edges: Vec<Vec<usize>>,
    pub in_edges: Vec<Vec<usize>>,
    pub dis_live: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Undo {
    Removed(usize),
    Ind(usize, usize),
    Mult(usize, usize),
    EdgeLive(usize),
    DisLive(usize, usize),
}

#[derive(Debug, Clone)]
pub struct PointingGraph {
    pub(crate) n: usize,
    pub(crate) m: usize,
    pub(crate) counts: ColumnCounts,
    pub(crate) state: GraphState,
    /// Position in `order` up to which construction has run.
    pub(crate) cursor: usize,
    pub(crate) journal: Option<Vec<Undo>>,
    /// RP has been tried on this vertex by the compatibility procedure.
    /// Survives rollbacks.
    pub(crate) tried: Vec<bool>,
    pub(crate) examinations: Vec<u32>,
    pub(crate) extensions: u32,
    pub(crate) double_removals: Vec<usize>,
    pub(crate) anc_mark: Vec<u32>,
    pub(crate) anc_epoch: u32,
}

/// Columns `j` with α(i, j) = 1 and α-count(j) = 1.
pub fn single_columns(pair: &DecompositionPair, counts: &ColumnCounts, i: usize) -> Vec<usize> {
    pair.alpha_row(i)
        .iter()
        .copied()
        .filter(|&j| counts.alpha[j] == 1)
        .collect()
}

/// True iff row `i` is the lone 1 of some α column and also the lone 1 of
/// some ᾱ column.
///
/// This test alone does not rule out a covering (row 1 of
/// `(¬x1 ∨ x2) ∧ (x1)` passes it), so the solver uses
/// [`both_sides_blocked`] instead.
pub fn both_single_shortcut(pair: &DecompositionPair, i: usize) -> bool {
    let c = pair.column_counts();
    pair.alpha_row(i).iter().any(|&j| c.alpha[j] == 1)
        && pair.alpha_bar_row(i).iter().any(|&j| c.alpha_bar[j] == 1)
}

/// True iff row `i` alone covers some column on the α side and alone
/// covers another on the ᾱ side. Either choice for the row then leaves a
/// column empty, so no covering exists.
pub fn both_sides_blocked(pair: &DecompositionPair, counts: &ColumnCounts, i: usize) -> bool {
    pair.alpha_row(i)
        .iter()
        .any(|&j| counts.alpha[j] == 1 && counts.alpha_bar[j] == 0)
        && pair
            .alpha_bar_row(i)
            .iter()
            .any(|&k| counts.alpha_bar[k] == 1 && counts.alpha[k] == 0)
}

/// Finds the zero columns of α and forms one main vertex for every ᾱ-row
/// holding a 1 in such a column.
pub fn find_main_vertices(pair: &DecompositionPair, meter: &mut Meter) -> MainVertices {
    let counts = pair.column_counts();
    meter.arith(pair.input_length() as u64);
    let mut g = PointingGraph::empty(pair.n(), pair.m(), counts);
    let mut any_zero = false;
    for q in 0..pair.m() {
        meter.cmp(1);
        if g.counts.alpha[q] != 0 {
            continue;
        }
        any_zero = true;
        for &r in pair.alpha_bar_col(q) {
            meter.cmp(1);
            if !g.state.formed[r] {
                g.form_main(r, meter);
            }
            g.state.assoc[r].push(q);
            g.state.multiplicity[q] += 1;
            meter.assign(1);
            meter.arith(1);
            meter.emit(Event::MainVertex {
                vertex: r,
                column: q,
            });
        }
    }
    if any_zero {
        MainVertices::Graph(g)
    } else {
        MainVertices::CoveringAlready
    }
}

/// Examines every formed vertex not yet examined, in formation order,
/// adding its outgoing edges and forming their targets.
pub fn construct(g: &mut PointingGraph, pair: &DecompositionPair, meter: &mut Meter) -> ConstructOutcome {
    let mut added = false;
    while g.cursor < g.state.order.len() {
        let q = g.state.order[g.cursor];
        g.cursor += 1;
        meter.cmp(2);
        if g.state.examined[q] || g.state.removed[q] {
            continue;
        }
        g.state.examined[q] = true;
        g.examinations[q] += 1;
        meter.assign(1);
        let mut single = false;
        for &j in pair.alpha_row(q) {
            meter.cmp(1);
            if g.counts.alpha[j] != 1 {
                continue;
            }
            single = true;
            meter.cmp(1);
            let bar = g.counts.alpha_bar[j];
            if bar == 0 {
                g.state.useless[q] = true;
                meter.assign(1);
                meter.emit(Event::UselessMarked {
                    vertex: q,
                    column: j,
                });
                break;
            }
            let kind = if bar == 1 {
                EdgeKind::Conjunctive
            } else {
                EdgeKind::Disjunctive
            };
            for &r in pair.alpha_bar_col(j) {
                meter.cmp(1);
                if g.state.removed[r] {
                    continue;
                }
                meter.cmp(1);
                if !g.state.formed[r] {
                    g.state.formed[r] = true;
                    g.state.order.push(r);
                    meter.assign(2);
                    meter.emit(Event::VertexFormed { vertex: r });
                }
                g.add_edge(q, r, EdgeLabel { kind, column: j }, meter);
                added = true;
            }
        }
        if !single {
            g.state.is_final[q] = true;
            meter.assign(1);
            meter.emit(Event::FinalMarked { vertex: q });
        }
    }
    if added {
        ConstructOutcome::Extended
    } else {
        ConstructOutcome::NoNewVertices
    }
}

impl PointingGraph {
    fn empty(n: usize, m: usize, counts: ColumnCounts) -> Self {
        PointingGraph {
            n,
            m,
            counts,
            state: GraphState {
                order: Vec::new(),
                formed: vec![false; n],
                removed: vec![false; n],
                main: vec![false; n],
                assoc: vec![Vec::new(); n],
                useless: vec![false; n],
                examined: vec![false; n],
                is_final: vec![false; n],
                ind: vec![0; n],
                multiplicity: vec![0; m],
                edges: Vec::new(),
                live: Vec::new(),
                out_edges: vec![Vec::new(); n],
                in_edges: vec![Vec::new(); n],
                dis_live: vec![0; m],
            },
            cursor: 0,
            journal: None,
            tried: vec![false; n],
            examinations: vec![0; n],
            extensions: 0,
            double_removals: Vec::new(),
            anc_mark: vec![0; n],
            anc_epoch: 0,
        }
    }

    /// Forms `r` as a main vertex. A main vertex carries one unit of
    /// indegree of its own, so it never becomes a generation.
    pub(crate) fn form_main(&mut self, r: usize, meter: &mut Meter) {
        let s = &mut self.state;
        s.formed[r] = true;
        s.main[r] = true;
        s.ind[r] += 1;
        s.order.push(r);
        meter.assign(3);
        meter.arith(1);
    }

    fn add_edge(&mut self, from: usize, to: usize, label: EdgeLabel, meter: &mut Meter) {
        let s = &mut self.state;
        let id = s.edges.len();
        s.edges.push(Edge { from, to, label });
        s.live.push(true);
        s.out_edges[from].push(id);
        s.in_edges[to].push(id);
        s.ind[to] += 1;
        meter.assign(4);
        meter.arith(1);
        if label.kind == EdgeKind::Disjunctive {
            s.dis_live[label.column] += 1;
            meter.arith(1);
        }
        meter.emit(Event::EdgeFormed {
            from,
            to,
            column: label.column,
            conjunctive: label.kind == EdgeKind::Conjunctive,
        });
    }

    /// Marks edge `id` dead and updates the target's indegree and the
    /// column's live disjunctive count. Returns the target's new indegree.
    pub(crate) fn kill_edge(&mut self, id: usize, meter: &mut Meter) -> usize {
        let e = self.state.edges[id];
        debug_assert!(self.state.live[id]);
        self.state.live[id] = false;
        let old_ind = self.state.ind[e.to];
        self.state.ind[e.to] = old_ind - 1;
        meter.assign(2);
        meter.arith(1);
        if let Some(j) = self.journal.as_mut() {
            j.push(Undo::EdgeLive(id));
            j.push(Undo::Ind(e.to, old_ind));
        }
        if e.label.kind == EdgeKind::Disjunctive {
            let c = e.label.column;
            let old = self.state.dis_live[c];
            self.state.dis_live[c] = old - 1;
            meter.arith(1);
            if let Some(j) = self.journal.as_mut() {
                j.push(Undo::DisLive(c, old));
            }
        }
        meter.emit(Event::EdgeRemoved {
            from: e.from,
            to: e.to,
            column: e.label.column,
        });
        old_ind - 1
    }

    pub(crate) fn mark_removed(&mut self, v: usize, meter: &mut Meter) {
        if self.state.removed[v] {
            self.double_removals.push(v);
        }
        self.state.removed[v] = true;
        meter.assign(1);
        if let Some(j) = self.journal.as_mut() {
            j.push(Undo::Removed(v));
        }
        meter.emit(Event::VertexRemoved { vertex: v });
    }

    pub(crate) fn set_multiplicity(&mut self, c: usize, value: usize, meter: &mut Meter) {
        let old = self.state.multiplicity[c];
        self.state.multiplicity[c] = value;
        meter.assign(1);
        if let Some(j) = self.journal.as_mut() {
            j.push(Undo::Mult(c, old));
        }
    }

    /// Starts recording changes so they can be undone.
    pub(crate) fn begin(&mut self, meter: &mut Meter) {
        debug_assert!(self.journal.is_none());
        self.journal = Some(Vec::new());
        meter.emit(Event::Snapshot);
    }

    /// Undoes every change since [`PointingGraph::begin`].
    pub(crate) fn rollback(&mut self, meter: &mut Meter) {
        let journal = self.journal.take().unwrap_or_default();
        meter.assign(journal.len() as u64);
        for u in journal.into_iter().rev() {
            match u {
                Undo::Removed(v) => self.state.removed[v] = false,
                Undo::Ind(v, x) => self.state.ind[v] = x,
                Undo::Mult(c, x) => self.state.multiplicity[c] = x,
                Undo::EdgeLive(e) => self.state.live[e] = true,
                Undo::DisLive(c, x) => self.state.dis_live[c] = x,
            }
        }
        meter.emit(Event::Restore);
    }

    pub(crate) fn commit(&mut self) {
        self.journal = None;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Column counts of the input decomposition.
    pub fn counts(&self) -> &ColumnCounts {
        &self.counts
    }

    /// Formed vertices in formation order (the array V).
    pub fn vertex_order(&self) -> &[usize] {
        &self.state.order
    }

    pub fn is_formed(&self, v: usize) -> bool {
        self.state.formed[v]
    }

    pub fn is_removed(&self, v: usize) -> bool {
        self.state.removed[v]
    }

    /// Formed and not removed.
    pub fn is_live(&self, v: usize) -> bool {
        self.state.formed[v] && !self.state.removed[v]
    }

    pub fn is_main(&self, v: usize) -> bool {
        self.state.main[v]
    }

    /// Columns a main vertex is associated with.
    pub fn associated_columns(&self, v: usize) -> &[usize] {
        &self.state.assoc[v]
    }

    pub fn is_useless(&self, v: usize) -> bool {
        self.state.useless[v]
    }

    pub fn is_final(&self, v: usize) -> bool {
        self.state.is_final[v]
    }

    pub fn is_examined(&self, v: usize) -> bool {
        self.state.examined[v]
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.state.ind[v]
    }

    pub fn multiplicity(&self, column: usize) -> usize {
        self.state.multiplicity[column]
    }

    /// Live vertices in ascending index order.
    pub fn live_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.is_live(v)).collect()
    }

    /// Live useless vertices in ascending index order.
    pub fn live_useless(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| self.state.useless[v] && self.is_live(v))
            .collect()
    }

    /// Every edge ever created, with its liveness.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, bool)> + '_ {
        self.state.edges.iter().copied().zip(self.state.live.iter().copied())
    }

    pub fn live_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges().filter(|&(_, l)| l).map(|(e, _)| e)
    }

    pub fn live_edge_count(&self) -> usize {
        self.state.live.iter().filter(|&&l| l).count()
    }

    pub fn created_edge_count(&self) -> usize {
        self.state.edges.len()
    }

    /// Number of live edges from `from` to `to`.
    pub fn graph_edges(&self, from: usize, to: usize) -> usize {
        self.state.out_edges[from]
            .iter()
            .filter(|&&e| self.state.live[e] && self.state.edges[e].to == to)
            .count()
    }

    /// Source of the live edge into `to` labeled with `column`, if any.
    pub fn edge_in(&self, column: usize, to: usize) -> Option<(usize, EdgeKind)> {
        self.state.in_edges[to]
            .iter()
            .map(|&e| (e, self.state.edges[e]))
            .find(|&(e, ed)| self.state.live[e] && ed.label.column == column)
            .map(|(_, ed)| (ed.from, ed.label.kind))
    }

    /// Live disjunctive edges from `from` labeled with `column`.
    pub fn dis_edges(&self, from: usize, column: usize) -> usize {
        self.state.out_edges[from]
            .iter()
            .filter(|&&e| {
                let ed = self.state.edges[e];
                self.state.live[e]
                    && ed.label.column == column
                    && ed.label.kind == EdgeKind::Disjunctive
            })
            .count()
    }

    /// How many times each vertex has been examined by construction.
    pub fn examinations(&self, v: usize) -> u32 {
        self.examinations[v]
    }

    pub fn extensions(&self) -> u32 {
        self.extensions
    }

    /// Checks the edge bound, indegree consistency, edge endpoints, the
    /// explore-once bound and that no vertex was removed twice.
    pub fn check_invariants(&self) -> Result<(), InvariantViolation> {
        let s = &self.state;
        let bound = self.n.saturating_sub(1) * self.m;
        if s.edges.len() > bound {
            return Err(InvariantViolation::EdgeBound {
                edges: s.edges.len(),
                bound,
            });
        }
        if let Some(&v) = self.double_removals.first() {
            return Err(InvariantViolation::DoubleRemoval { vertex: v + 1 });
        }
        let mut live_in = vec![0usize; self.n];
        for (id, e) in s.edges.iter().enumerate() {
            if !s.live[id] {
                continue;
            }
            if !self.is_live(e.from) || !self.is_live(e.to) {
                return Err(InvariantViolation::DeadEndpoint {
                    from: e.from + 1,
                    to: e.to + 1,
                });
            }
            live_in[e.to] += 1;
        }
        for (v, &count) in live_in.iter().enumerate() {
            if !self.is_live(v) {
                continue;
            }
            let expected = count + usize::from(s.main[v]);
            if s.ind[v] != expected {
                return Err(InvariantViolation::Indegree {
                    vertex: v + 1,
                    expected,
                    found: s.ind[v],
                });
            }
        }
        let limit = 1 + self.extensions;
        if let Some(v) = (0..self.n).find(|&v| self.examinations[v] > limit) {
            return Err(InvariantViolation::Examinations {
                vertex: v + 1,
                count: self.examinations[v],
                bound: limit,
            });
        }
        Ok(())
    }
}
