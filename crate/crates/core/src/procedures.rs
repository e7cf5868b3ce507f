//! Removal, cleaning, incompatibility elimination and graph extension.
//!
//! Trial removals are wrapped in an undo journal. A failed attempt is rolled
//! back entry by entry, which leaves the graph identical to a full
//! [`StateSnapshot`] taken before the attempt.

use alloc::vec;
use alloc::vec::Vec;

use crate::decomposition::{DecompositionPair, SwapSet};
use crate::graph::{EdgeKind, GraphState, PointingGraph};
use crate::ops::{Event, Meter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovalOutcome {
    pub removable: bool,
    /// Vertices marked removed, in removal order.
    pub removed_vertices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CleanOutcome {
    Clean,
    NotCleanable { vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompatibleSet {
    pub column: usize,
    pub vertices: Vec<usize>,
}

/// New main vertices for an extension. `columns[k]` is the column that
/// justified `new_main_vertices[k]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtensionPlan {
    pub new_main_vertices: Vec<usize>,
    pub columns: Vec<usize>,
}

impl ExtensionPlan {
    pub fn is_empty(&self) -> bool {
        self.new_main_vertices.is_empty()
    }

    fn push(&mut self, row: usize, column: usize) {
        if !self.new_main_vertices.contains(&row) {
            self.new_main_vertices.push(row);
            self.columns.push(column);
        }
    }

    /// Distinct justifying columns in first-seen order.
    pub fn distinct_columns(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &c in &self.columns {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EliminationOutcome {
    Eliminated,
    NeedsExtension(ExtensionPlan),
    /// No member of the set on `column` is removable and no fresh row
    /// holds the column on its ᾱ side.
    Unreachable { column: usize },
}

/// A deep copy of the mutable graph state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSnapshot(GraphState);

impl StateSnapshot {
    pub fn capture(g: &PointingGraph) -> Self {
        StateSnapshot(g.state.clone())
    }

    pub fn restore(&self, g: &mut PointingGraph) {
        g.state = self.0.clone();
    }
}

/// Applies the removal procedure starting at `start`.
///
/// Ancestors are processed first: each is removed together with its in- and
/// out-edges. A source with a conjunctive edge, or with a disjunctive edge
/// that is the last live one for its column, becomes an ancestor itself;
/// other sources only lose their edges into the vertex. Targets whose
/// indegree drops to zero become generations, which are then removed with
/// their out-edges. Removing a main vertex that is the last one for one of
/// its columns aborts with `removable = false`; the caller decides whether
/// to roll back.
pub fn removal_procedure(g: &mut PointingGraph, start: usize, meter: &mut Meter) -> RemovalOutcome {
    debug_assert!(g.is_live(start), "removal started at a dead vertex");
    meter.emit(Event::RpStart { vertex: start });
    g.anc_epoch = g.anc_epoch.wrapping_add(1);
    if g.anc_epoch == 0 {
        g.anc_mark.iter_mut().for_each(|x| *x = 0);
        g.anc_epoch = 1;
    }
    let epoch = g.anc_epoch;
    let mut anc = vec![start];
    g.anc_mark[start] = epoch;
    let mut gen: Vec<usize> = Vec::new();
    let mut removed = Vec::new();
    let mut k = 0;
    meter.assign(1);

    while k < anc.len() {
        let p = anc[k];
        k += 1;
        meter.cmp(1);
        if g.state.removed[p] {
            continue;
        }
        g.mark_removed(p, meter);
        removed.push(p);

        meter.cmp(1);
        if g.state.main[p] {
            let cols = g.state.assoc[p].clone();
            meter.cmp(cols.len() as u64);
            if cols.iter().any(|&c| g.state.multiplicity[c] == 1) {
                meter.emit(Event::RpResult {
                    vertex: start,
                    removable: false,
                });
                return RemovalOutcome {
                    removable: false,
                    removed_vertices: removed,
                };
            }
            for c in cols {
                let v = g.state.multiplicity[c] - 1;
                meter.arith(1);
                g.set_multiplicity(c, v, meter);
            }
        }

        // incoming edges, grouped by source in ascending order
        let mut incoming: Vec<usize> = g.state.in_edges[p]
            .iter()
            .copied()
            .filter(|&e| g.state.live[e])
            .collect();
        meter.cmp(g.state.in_edges[p].len() as u64);
        incoming.sort_unstable_by_key(|&e| (g.state.edges[e].from, e));
        let mut i = 0;
        while i < incoming.len() {
            let r = g.state.edges[incoming[i]].from;
            let mut j = i;
            while j < incoming.len() && g.state.edges[incoming[j]].from == r {
                j += 1;
            }
            let group = &incoming[i..j];
            let binding = group.iter().any(|&e| {
                let ed = g.state.edges[e];
                meter.cmp(2);
                ed.label.kind == EdgeKind::Conjunctive || g.state.dis_live[ed.label.column] <= 1
            });
            for &e in group {
                g.kill_edge(e, meter);
            }
            if binding {
                meter.cmp(1);
                if g.anc_mark[r] != epoch {
                    g.anc_mark[r] = epoch;
                    anc.push(r);
                    meter.assign(2);
                }
            }
            i = j;
        }

        cascade_out(g, p, &mut gen, meter);
    }

    let mut k = 0;
    while k < gen.len() {
        let q = gen[k];
        k += 1;
        meter.cmp(1);
        if g.state.removed[q] {
            continue;
        }
        g.mark_removed(q, meter);
        removed.push(q);
        cascade_out(g, q, &mut gen, meter);
    }

    meter.emit(Event::RpResult {
        vertex: start,
        removable: true,
    });
    RemovalOutcome {
        removable: true,
        removed_vertices: removed,
    }
}

fn cascade_out(g: &mut PointingGraph, p: usize, gen: &mut Vec<usize>, meter: &mut Meter) {
    let out: Vec<usize> = g.state.out_edges[p]
        .iter()
        .copied()
        .filter(|&e| g.state.live[e])
        .collect();
    meter.cmp(g.state.out_edges[p].len() as u64);
    for e in out {
        let s = g.state.edges[e].to;
        let ind = g.kill_edge(e, meter);
        meter.cmp(1);
        if ind == 0 && !g.state.removed[s] {
            gen.push(s);
            meter.assign(1);
        }
    }
}

/// Removal wrapped in the journal: committed when removable, rolled back
/// otherwise.
fn try_remove(g: &mut PointingGraph, v: usize, meter: &mut Meter) -> RemovalOutcome {
    g.begin(meter);
    let out = removal_procedure(g, v, meter);
    if out.removable {
        g.commit();
    } else {
        g.rollback(meter);
    }
    out
}

/// Removes every live useless vertex in ascending index order. Stops at
/// the first non-removable one, leaving the graph as it was before that
/// attempt.
pub fn clean(g: &mut PointingGraph, meter: &mut Meter) -> CleanOutcome {
    let order: Vec<usize> = (0..g.n).collect();
    clean_in_order(g, &order, meter)
}

/// [`clean`] with an explicit visiting order over vertex indices.
pub fn clean_in_order(g: &mut PointingGraph, order: &[usize], meter: &mut Meter) -> CleanOutcome {
    for &v in order {
        meter.cmp(2);
        if !(g.state.useless[v] && g.is_live(v)) {
            continue;
        }
        if !try_remove(g, v, meter).removable {
            return CleanOutcome::NotCleanable { vertex: v };
        }
    }
    CleanOutcome::Clean
}

/// The live vertices as a swap set.
pub fn live_swap_set(g: &PointingGraph) -> SwapSet {
    SwapSet::new(g.live_vertices())
}

/// The input decomposition with every live vertex's pair swapped.
pub fn decomposition_from_graph(g: &PointingGraph, pair: &DecompositionPair) -> DecompositionPair {
    pair.apply_swaps(&live_swap_set(g))
        .expect("live vertices are rows of the pair")
}

/// α-counts of the swapped decomposition, computed from the live rows.
fn swapped_alpha_counts(g: &PointingGraph, pair: &DecompositionPair, meter: &mut Meter) -> Vec<usize> {
    let mut cnt = g.counts.alpha.clone();
    meter.assign(cnt.len() as u64);
    for v in 0..g.n {
        meter.cmp(1);
        if g.is_live(v) {
            swap_row_counts(&mut cnt, pair, v, meter);
        }
    }
    cnt
}

fn swap_row_counts(cnt: &mut [usize], pair: &DecompositionPair, v: usize, meter: &mut Meter) {
    for &c in pair.alpha_row(v) {
        cnt[c] -= 1;
    }
    for &c in pair.alpha_bar_row(v) {
        cnt[c] += 1;
    }
    meter.arith((pair.alpha_row(v).len() + pair.alpha_bar_row(v).len()) as u64);
}

fn unswap_row_counts(cnt: &mut [usize], pair: &DecompositionPair, v: usize, meter: &mut Meter) {
    for &c in pair.alpha_bar_row(v) {
        cnt[c] -= 1;
    }
    for &c in pair.alpha_row(v) {
        cnt[c] += 1;
    }
    meter.arith((pair.alpha_row(v).len() + pair.alpha_bar_row(v).len()) as u64);
}

/// Every column left empty by the swapped decomposition, with the live
/// vertices whose α-row holds it.
pub fn find_incompatible_sets(g: &PointingGraph, pair: &DecompositionPair) -> Vec<IncompatibleSet> {
    let cnt = swapped_alpha_counts(g, pair, &mut Meter::off());
    (0..g.m)
        .filter(|&j| cnt[j] == 0)
        .map(|j| IncompatibleSet {
            column: j,
            vertices: pair
                .alpha_col(j)
                .iter()
                .copied()
                .filter(|&r| g.is_live(r))
                .collect(),
        })
        .collect()
}

/// The compatibility procedure over a clean graph.
///
/// Columns are scanned in ascending order. For an empty column the removal
/// procedure is tried on each member of its incompatible set that has not
/// been tried before in this solve. The first removable member is committed
/// and the scan restarts at the first column. If none is removable, fresh
/// rows holding the column on the ᾱ side are added to the extension plan;
/// without such rows the column is unreachable.
pub fn eliminate_incompatibilities(
    g: &mut PointingGraph,
    pair: &DecompositionPair,
    meter: &mut Meter,
) -> EliminationOutcome {
    let mut cnt = swapped_alpha_counts(g, pair, meter);
    'scan: loop {
        let mut plan = ExtensionPlan::default();
        let mut found = false;
        for j in 0..g.m {
            meter.cmp(1);
            if cnt[j] != 0 {
                continue;
            }
            found = true;
            let members: Vec<usize> = pair
                .alpha_col(j)
                .iter()
                .copied()
                .filter(|&r| g.is_live(r))
                .collect();
            meter.cmp(pair.alpha_col(j).len() as u64);
            meter.emit_with(|| Event::IncompatFound {
                column: j,
                vertices: members.clone(),
            });
            for &r in &members {
                meter.cmp(1);
                if g.tried[r] {
                    continue;
                }
                g.tried[r] = true;
                meter.assign(1);
                let out = try_remove(g, r, meter);
                if out.removable {
                    for &v in &out.removed_vertices {
                        unswap_row_counts(&mut cnt, pair, v, meter);
                    }
                    meter.emit(Event::IncompatEliminated {
                        column: j,
                        vertex: r,
                    });
                    continue 'scan;
                }
            }
            let mut fresh = false;
            for &p in pair.alpha_bar_col(j) {
                meter.cmp(1);
                if !g.state.formed[p] {
                    fresh = true;
                    plan.push(p, j);
                    meter.emit(Event::ExtensionPlanned {
                        vertex: p,
                        column: j,
                    });
                }
            }
            if !fresh {
                return EliminationOutcome::Unreachable { column: j };
            }
        }
        return if found {
            EliminationOutcome::NeedsExtension(plan)
        } else {
            EliminationOutcome::Eliminated
        };
    }
}

/// Forms every plan row as a main vertex. Each new main vertex is
/// associated with, and raises the multiplicity of, every plan column its
/// ᾱ-row holds.
pub fn extend(g: &mut PointingGraph, pair: &DecompositionPair, plan: &ExtensionPlan, meter: &mut Meter) {
    let cols = plan.distinct_columns();
    for &p in &plan.new_main_vertices {
        assert!(
            !g.state.formed[p],
            "extension row {} is already in the graph",
            p + 1
        );
        g.form_main(p, meter);
        for &c in &cols {
            meter.cmp(1);
            if pair.alpha_bar_at(p, c) {
                g.state.assoc[p].push(c);
                g.state.multiplicity[c] += 1;
                meter.assign(1);
                meter.arith(1);
            }
        }
    }
    g.extensions += 1;
    meter.emit_with(|| Event::Extended {
        vertices: plan.new_main_vertices.clone(),
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{construct, find_main_vertices, MainVertices};

    fn built(alpha: &[&str], bar: &[&str]) -> (DecompositionPair, PointingGraph) {
        let p = DecompositionPair::from_strs(alpha, bar).unwrap();
        let mut m = Meter::off();
        let MainVertices::Graph(mut g) = find_main_vertices(&p, &mut m) else {
            panic!("expected main vertices")
        };
        construct(&mut g, &p, &mut m);
        (p, g)
    }

    #[test]
    fn rp_on_e1_final_vertex_fails_through_ancestor() {
        let (_, mut g) = built(&["10", "00"], &["01", "10"]);
        let out = removal_procedure(&mut g, 1, &mut Meter::off());
        assert!(!out.removable);
        assert_eq!(out.removed_vertices, vec![1, 0]);
    }

    #[test]
    fn rp_on_e3_main_vertex_fails_immediately() {
        let (_, mut g) = built(&["100", "100"], &["010", "001"]);
        let out = removal_procedure(&mut g, 0, &mut Meter::off());
        assert!(!out.removable);
        assert_eq!(out.removed_vertices, vec![0]);
    }

    #[test]
    fn rp_on_isolated_vertex() {
        // v1 main for column 3 with a twin v2; v1 has no edges
        let (_, mut g) = built(&["110", "110"], &["001", "001"]);
        assert_eq!(g.multiplicity(2), 2);
        let out = removal_procedure(&mut g, 0, &mut Meter::off());
        assert!(out.removable);
        assert_eq!(out.removed_vertices, vec![0]);
        assert_eq!(g.multiplicity(2), 1);
    }

    #[test]
    fn clean_e2_not_cleanable_and_restored() {
        let (_, mut g) = built(&["01"], &["10"]);
        let before = StateSnapshot::capture(&g);
        assert_eq!(
            clean(&mut g, &mut Meter::off()),
            CleanOutcome::NotCleanable { vertex: 0 }
        );
        assert_eq!(StateSnapshot::capture(&g), before);
    }

    #[test]
    fn clean_without_useless_is_noop() {
        let (_, mut g) = built(&["10", "00"], &["01", "10"]);
        let before = StateSnapshot::capture(&g);
        assert_eq!(clean(&mut g, &mut Meter::off()), CleanOutcome::Clean);
        assert_eq!(StateSnapshot::capture(&g), before);
    }

    #[test]
    fn cascade_removes_second_useless_vertex() {
        // v1, v4 main for column 4; v1 single on column 1 (disjunctive to
        // v2, v3); v2 and v3 are useless. Removing v2 drops a disjunctive
        // edge; removing v3 then makes v1 an ancestor, which v4 backs up.
        let (_, mut g) = built(
            &["1000", "0100", "0010", "0000"],
            &["0001", "1000", "1000", "0001"],
        );
        assert_eq!(g.live_useless(), vec![1, 2]);
        assert_eq!(clean(&mut g, &mut Meter::off()), CleanOutcome::Clean);
        assert!(g.live_useless().is_empty());
        assert_eq!(g.live_vertices(), vec![3]);
        assert_eq!(g.multiplicity(3), 1);
    }

    #[test]
    fn swapped_views() {
        let (p, g) = built(&["10", "00"], &["01", "10"]);
        let d = decomposition_from_graph(&g, &p);
        assert_eq!(d.column_counts().alpha, vec![1, 1]);
        assert!(find_incompatible_sets(&g, &p).is_empty());

        let (p, g) = built(&["100", "100"], &["010", "001"]);
        let d = decomposition_from_graph(&g, &p);
        assert_eq!(d.column_counts().alpha, vec![0, 1, 1]);
        assert_eq!(
            find_incompatible_sets(&g, &p),
            vec![IncompatibleSet {
                column: 0,
                vertices: vec![0, 1]
            }]
        );
    }

    #[test]
    fn eliminate_e1_and_e3() {
        let (p, mut g) = built(&["10", "00"], &["01", "10"]);
        assert_eq!(
            eliminate_incompatibilities(&mut g, &p, &mut Meter::off()),
            EliminationOutcome::Eliminated
        );
        let (p, mut g) = built(&["100", "100"], &["010", "001"]);
        assert_eq!(
            eliminate_incompatibilities(&mut g, &p, &mut Meter::off()),
            EliminationOutcome::Unreachable { column: 0 }
        );
        assert_eq!(g.live_vertices(), vec![0, 1]);
    }

    #[test]
    fn eliminate_plans_fresh_row() {
        // main rows 1, 2 swap out column 1; row 3 is never formed and holds
        // column 1 on its ᾱ side
        let (p, mut g) = built(&["1000", "1000", "0100"], &["0010", "0001", "1000"]);
        let out = eliminate_incompatibilities(&mut g, &p, &mut Meter::off());
        let EliminationOutcome::NeedsExtension(plan) = out else {
            panic!("expected an extension, got {out:?}")
        };
        assert_eq!(plan.new_main_vertices, vec![2]);
        extend(&mut g, &p, &plan, &mut Meter::off());
        assert!(g.is_main(2));
        assert_eq!(g.multiplicity(0), 1);
        assert_eq!(g.indegree(2), 1);
        g.check_invariants().unwrap();
    }

    #[test]
    fn rollback_matches_snapshot() {
        let (_, mut g) = built(&["10", "00"], &["01", "10"]);
        let snap = StateSnapshot::capture(&g);
        let mut m = Meter::off();
        assert!(!try_remove(&mut g, 1, &mut m).removable);
        assert_eq!(StateSnapshot::capture(&g), snap);
        removal_procedure(&mut g, 1, &mut m);
        assert_ne!(StateSnapshot::capture(&g), snap);
        snap.restore(&mut g);
        assert_eq!(StateSnapshot::capture(&g), snap);
    }
}
