//! Reference deciders that share no code with the covering engine.
//!
//! `brute_sat` and `brute_covering` walk the full assignment (or swap-set)
//! tree in a fixed order and cut a branch only once some clause (column)
//! has all its variables (rows) fixed and is unsatisfied (uncovered). The
//! answer and witness are the ones plain enumeration would give first.

use covsat_core::{Assignment, CnfFormula, DecompositionPair, SwapSet};

pub const BRUTE_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{size} exceeds the exhaustive limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

/// First satisfying assignment in enumeration order (variable 1 decided
/// first, false before true), or `None`.
pub fn brute_sat(f: &CnfFormula) -> Result<Option<Assignment>, OracleError> {
    let n = f.num_vars;
    if n > BRUTE_LIMIT {
        return Err(OracleError::TooLarge {
            size: n,
            limit: BRUTE_LIMIT,
        });
    }
    if f.has_empty_clause {
        return Ok(None);
    }
    // clause masks bucketed by their highest variable
    let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for c in &f.clauses {
        let (mut pos, mut neg, mut top) = (0u32, 0u32, 0usize);
        for &l in c {
            let v = l.unsigned_abs() as usize - 1;
            if l > 0 {
                pos |= 1 << v;
            } else {
                neg |= 1 << v;
            }
            top = top.max(v);
        }
        buckets[top].push((pos, neg));
    }
    for b in &mut buckets {
        b.sort_by_key(|&(p, q)| (p | q).count_ones());
    }

    fn walk(d: usize, bits: u32, buckets: &[Vec<(u32, u32)>]) -> Option<u32> {
        if d == buckets.len() {
            return Some(bits);
        }
        for value in [0u32, 1] {
            let b = bits | (value << d);
            if buckets[d].iter().all(|&(p, q)| (p & b) | (q & !b) != 0) {
                if let Some(w) = walk(d + 1, b, buckets) {
                    return Some(w);
                }
            }
        }
        None
    }

    Ok(walk(0, 0, &buckets).map(|bits| Assignment {
        values: (0..n).map(|i| bits >> i & 1 == 1).collect(),
    }))
}

/// First swap set in enumeration order (row 1 decided first, unswapped
/// before swapped) whose swapped α matrix covers every column.
pub fn brute_covering(pair: &DecompositionPair) -> Result<Option<SwapSet>, OracleError> {
    let (n, m) = (pair.n(), pair.m());
    if n > BRUTE_LIMIT {
        return Err(OracleError::TooLarge {
            size: n,
            limit: BRUTE_LIMIT,
        });
    }
    let words = m.div_ceil(64).max(1);
    let row_set = |cols: &[usize]| {
        let mut w = vec![0u64; words];
        for &c in cols {
            w[c / 64] |= 1 << (c % 64);
        }
        w
    };
    let sides: Vec<[Vec<u64>; 2]> = (0..n)
        .map(|i| [row_set(pair.alpha_row(i)), row_set(pair.alpha_bar_row(i))])
        .collect();
    // columns bucketed by the last row that touches them
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..m {
        let last = pair
            .alpha_col(j)
            .iter()
            .chain(pair.alpha_bar_col(j))
            .max()
            .copied();
        match last {
            Some(r) => buckets[r].push(j),
            None => return Ok(None),
        }
    }

    fn walk(
        d: usize,
        covered: &[u64],
        sides: &[[Vec<u64>; 2]],
        buckets: &[Vec<usize>],
        chosen: &mut Vec<usize>,
    ) -> bool {
        if d == sides.len() {
            return true;
        }
        for side in 0..2 {
            let next: Vec<u64> = covered.iter().zip(&sides[d][side]).map(|(a, b)| a | b).collect();
            if buckets[d].iter().all(|&j| next[j / 64] >> (j % 64) & 1 == 1) {
                if side == 1 {
                    chosen.push(d);
                }
                if walk(d + 1, &next, sides, buckets, chosen) {
                    return true;
                }
                if side == 1 {
                    chosen.pop();
                }
            }
        }
        false
    }

    let mut chosen = Vec::new();
    if n == 0 {
        return Ok((m == 0).then(SwapSet::default));
    }
    Ok(walk(0, &vec![0; words], &sides, &buckets, &mut chosen).then(|| SwapSet::new(chosen)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DpllOutcome {
    Sat(Assignment),
    Unsat,
    /// The step budget ran out.
    Unknown,
}

/// DPLL with unit propagation. Every clause visit costs one step; the
/// search gives up once `budget` steps are spent.
pub fn dpll(f: &CnfFormula, budget: u64) -> DpllOutcome {
    if f.has_empty_clause {
        return DpllOutcome::Unsat;
    }
    let mut s = Dpll {
        clauses: &f.clauses,
        value: vec![0; f.num_vars],
        steps: 0,
        budget,
    };
    match s.search() {
        Some(true) => DpllOutcome::Sat(Assignment {
            values: s.value.iter().map(|&v| v > 0).collect(),
        }),
        Some(false) => DpllOutcome::Unsat,
        None => DpllOutcome::Unknown,
    }
}

struct Dpll<'a> {
    clauses: &'a [Vec<i32>],
    /// 0 unassigned, 1 true, -1 false.
    value: Vec<i8>,
    steps: u64,
    budget: u64,
}

enum Status {
    Satisfied,
    Conflict,
    Unit(i32),
    Open(i32),
}

impl Dpll<'_> {
    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize - 1];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    fn set(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize - 1] = if l > 0 { 1 } else { -1 };
    }

    /// Propagates units to fixpoint. Returns the first literal of an open
    /// clause to branch on, `Ok(None)` when all clauses are satisfied, or
    /// `Err(())` on conflict; `trail` collects what was assigned.
    fn propagate(&mut self, trail: &mut Vec<usize>) -> Result<Option<i32>, Option<()>> {
        loop {
            let mut open = None;
            let mut unit = None;
            for c in self.clauses {
                self.steps += 1;
                match self.status(c) {
                    Status::Satisfied => {}
                    Status::Conflict => return Err(Some(())),
                    Status::Unit(l) => {
                        unit = Some(l);
                        break;
                    }
                    Status::Open(l) => {
                        open.get_or_insert(l);
                    }
                }
            }
            if self.steps > self.budget {
                return Err(None);
            }
            match unit {
                Some(l) => {
                    self.set(l);
                    trail.push(l.unsigned_abs() as usize - 1);
                }
                None => return Ok(open),
            }
        }
    }

    fn status(&self, c: &[i32]) -> Status {
        let mut free = None;
        let mut n_free = 0;
        for &l in c {
            match self.lit_value(l) {
                1 => return Status::Satisfied,
                0 => {
                    n_free += 1;
                    free.get_or_insert(l);
                }
                _ => {}
            }
        }
        match (n_free, free) {
            (0, _) => Status::Conflict,
            (1, Some(l)) => Status::Unit(l),
            (_, Some(l)) => Status::Open(l),
            _ => unreachable!(),
        }
    }

    /// `Some(sat)` or `None` when out of budget.
    fn search(&mut self) -> Option<bool> {
        let mut trail = Vec::new();
        let branch = match self.propagate(&mut trail) {
            Ok(b) => b,
            Err(Some(())) => {
                self.undo(&trail);
                return Some(false);
            }
            Err(None) => return None,
        };
        let Some(l) = branch else {
            return Some(true);
        };
        for lit in [l, -l] {
            self.set(lit);
            match self.search() {
                Some(true) => return Some(true),
                Some(false) => self.value[lit.unsigned_abs() as usize - 1] = 0,
                None => return None,
            }
        }
        self.undo(&trail);
        Some(false)
    }

    fn undo(&mut self, trail: &[usize]) {
        for &v in trail {
            self.value[v] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use covsat_core::cnf::evaluate;

    fn f(n: usize, cs: &[&[i64]]) -> CnfFormula {
        CnfFormula::new(n, cs.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn brute_sat_examples() {
        let e1 = f(2, &[&[-1, 2], &[1]]);
        assert_eq!(
            brute_sat(&e1).unwrap(),
            Some(Assignment {
                values: vec![true, true]
            })
        );
        assert_eq!(brute_sat(&f(1, &[&[1], &[-1]])).unwrap(), None);
        assert_eq!(
            brute_sat(&f(3, &[])).unwrap(),
            Some(Assignment::all_false(3))
        );
        assert!(brute_sat(&f(26, &[])).is_err());
    }

    #[test]
    fn brute_covering_examples() {
        let e1 = DecompositionPair::from_strs(&["10", "00"], &["01", "10"]).unwrap();
        assert_eq!(brute_covering(&e1).unwrap(), Some(SwapSet::new([0, 1])));
        let e3 = DecompositionPair::from_strs(&["100", "100"], &["010", "001"]).unwrap();
        assert_eq!(brute_covering(&e3).unwrap(), None);
        let one = DecompositionPair::from_strs(&["111"], &["000"]).unwrap();
        assert_eq!(brute_covering(&one).unwrap(), Some(SwapSet::default()));
    }

    #[test]
    fn dpll_examples() {
        let e1 = f(2, &[&[-1, 2], &[1]]);
        let DpllOutcome::Sat(a) = dpll(&e1, 1000) else {
            panic!("E1 is satisfiable")
        };
        assert!(evaluate(&e1, &a));
        assert_eq!(dpll(&f(1, &[&[1], &[-1]]), 1000), DpllOutcome::Unsat);
        // pigeonhole 3 into 2 needs more than a handful of steps
        let php = f(
            6,
            &[&[1, 2], &[3, 4], &[5, 6], &[-1, -3], &[-1, -5], &[-3, -5], &[-2, -4], &[-2, -6], &[-4, -6]],
        );
        assert_eq!(dpll(&php, 5), DpllOutcome::Unknown);
        assert_eq!(dpll(&php, 100_000), DpllOutcome::Unsat);
    }
}
