//! CNF formulas and their encoding as a decomposition of the clause set.
//!
//! Each variable contributes one pair: the clauses holding its negative
//! literal go on the α side, the clauses holding its positive literal on the
//! ᾱ side. Swapping a pair therefore selects the positive literal, so a
//! covering swap set reads back as "variable is true iff its row was
//! swapped".

use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitMatrix;
use crate::decomposition::{DecompositionPair, SwapSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CnfError {
    #[error("literal {literal} in clause {clause} is outside 1..={num_vars}")]
    LiteralOutOfRange {
        clause: usize,
        literal: i64,
        num_vars: usize,
    },
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("variable {variable} occurs in no clause")]
    UnusedVariable { variable: usize },
}

/// A preprocessed CNF formula.
///
/// Tautologies and duplicate literals have been removed. An empty clause is
/// not stored among `clauses`; it sets `has_empty_clause` instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    pub has_empty_clause: bool,
    /// 1-based number of each kept clause in the original input.
    pub origin: Vec<usize>,
}

/// What preprocessing changed. Indices are 1-based in input numbering.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreprocessReport {
    pub removed_tautologies: Vec<usize>,
    pub deduped_literals: usize,
    pub unused_variables: Vec<usize>,
    pub empty_clause_found: bool,
}

impl CnfFormula {
    /// Applies the three preprocessing rules to raw clauses: duplicate
    /// literals are dropped, clauses holding `v` and `-v` are dropped, and an
    /// empty clause is flagged. Variables that no longer occur are listed as
    /// unused.
    pub fn preprocess(
        num_vars: usize,
        raw: Vec<Vec<i64>>,
    ) -> Result<(CnfFormula, PreprocessReport), CnfError> {
        let mut report = PreprocessReport::default();
        let mut clauses = Vec::with_capacity(raw.len());
        let mut origin = Vec::with_capacity(raw.len());
        let mut seen = vec![0u8; num_vars + 1];
        let mut has_empty_clause = false;

        for (ci, lits) in raw.into_iter().enumerate() {
            let mut clause: Vec<i32> = Vec::with_capacity(lits.len());
            let mut tautology = false;
            for &lit in &lits {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > num_vars {
                    return Err(CnfError::LiteralOutOfRange {
                        clause: ci + 1,
                        literal: lit,
                        num_vars,
                    });
                }
                let bit = if lit > 0 { 1 } else { 2 };
                if seen[var] & bit != 0 {
                    report.deduped_literals += 1;
                    continue;
                }
                if seen[var] != 0 {
                    tautology = true;
                }
                seen[var] |= bit;
                clause.push(lit as i32);
            }
            for &lit in &clause {
                seen[lit.unsigned_abs() as usize] = 0;
            }
            if tautology {
                report.removed_tautologies.push(ci + 1);
            } else if clause.is_empty() {
                has_empty_clause = true;
            } else {
                clauses.push(clause);
                origin.push(ci + 1);
            }
        }

        report.empty_clause_found = has_empty_clause;
        let f = CnfFormula {
            num_vars,
            clauses,
            has_empty_clause,
            origin,
        };
        report.unused_variables = f.unused_variables();
        Ok((f, report))
    }

    /// Preprocesses and drops the report.
    pub fn new(num_vars: usize, raw: Vec<Vec<i64>>) -> Result<CnfFormula, CnfError> {
        CnfFormula::preprocess(num_vars, raw).map(|(f, _)| f)
    }

    /// 1-based variables that occur in no kept clause.
    pub fn unused_variables(&self) -> Vec<usize> {
        let mut used = vec![false; self.num_vars + 1];
        for c in &self.clauses {
            for &l in c {
                used[l.unsigned_abs() as usize] = true;
            }
        }
        (1..=self.num_vars).filter(|&v| !used[v]).collect()
    }

    /// Clauses with literals sorted by variable, negative before positive.
    pub fn canonical_clauses(&self) -> Vec<Vec<i32>> {
        self.clauses
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable_by_key(|&l| (l.unsigned_abs(), l > 0));
                c
            })
            .collect()
    }

    /// Total number of literal occurrences.
    pub fn literal_count(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }

    pub fn to_matrix(&self) -> CnfMatrix {
        let rows = self
            .clauses
            .iter()
            .map(|c| {
                let mut row: Vec<(usize, i8)> = c
                    .iter()
                    .map(|&l| (l.unsigned_abs() as usize - 1, if l > 0 { 1 } else { -1 }))
                    .collect();
                row.sort_unstable();
                row
            })
            .collect();
        CnfMatrix {
            num_vars: self.num_vars,
            rows,
        }
    }
}

/// The clause × variable matrix with entries in {-1, 0, 1}: -1 where the
/// clause holds the negative literal, +1 where it holds the positive one.
///
/// Stored by rows of nonzero entries; [`CnfMatrix::get`] gives the dense
/// view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfMatrix {
    num_vars: usize,
    rows: Vec<Vec<(usize, i8)>>,
}

impl CnfMatrix {
    /// Builds a matrix from dense rows (one per clause).
    pub fn from_dense<R: AsRef<[i8]>>(num_vars: usize, rows: &[R]) -> Self {
        let rows = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(j, &v)| (j, v.signum()))
                    .collect()
            })
            .collect();
        CnfMatrix { num_vars, rows }
    }

    /// Number of clauses (rows).
    pub fn clauses(&self) -> usize {
        self.rows.len()
    }

    /// Number of variables (columns).
    pub fn vars(&self) -> usize {
        self.num_vars
    }

    /// Entry at clause `i`, variable `j` (0-based).
    pub fn get(&self, i: usize, j: usize) -> i8 {
        match self.rows[i].binary_search_by_key(&j, |&(v, _)| v) {
            Ok(k) => self.rows[i][k].1,
            Err(_) => 0,
        }
    }

    pub fn row(&self, i: usize) -> &[(usize, i8)] {
        &self.rows[i]
    }

    pub fn nonzero_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<i8>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0; self.num_vars];
                for &(j, v) in r {
                    d[j] = v;
                }
                d
            })
            .collect()
    }

    /// Reads the clauses back; literals come out sorted by variable.
    pub fn to_clauses(&self) -> Vec<Vec<i32>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&(j, v)| (j as i32 + 1) * i32::from(v))
                    .collect()
            })
            .collect()
    }

    /// Drops variable columns with no nonzero entry. Returns the compacted
    /// matrix and, for each kept column, its 0-based variable in `self`.
    pub fn without_unused_columns(&self) -> (CnfMatrix, Vec<usize>) {
        let mut used = vec![false; self.num_vars];
        for r in &self.rows {
            for &(j, _) in r {
                used[j] = true;
            }
        }
        let kept: Vec<usize> = (0..self.num_vars).filter(|&j| used[j]).collect();
        let mut new_index = vec![usize::MAX; self.num_vars];
        for (k, &j) in kept.iter().enumerate() {
            new_index[j] = k;
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| (new_index[j], v)).collect())
            .collect();
        (
            CnfMatrix {
                num_vars: kept.len(),
                rows,
            },
            kept,
        )
    }

    /// Encodes the matrix as a decomposition of the clause set: row `i` is
    /// variable `i`, column `j` is clause `j`; α holds negative-literal
    /// clauses and ᾱ positive-literal clauses.
    pub fn to_decomposition(&self) -> Result<DecompositionPair, CnfError> {
        let (n, m) = (self.num_vars, self.rows.len());
        let mut alpha = BitMatrix::zeros(n, m);
        let mut alpha_bar = BitMatrix::zeros(n, m);
        let mut used = vec![false; n];
        for (j, r) in self.rows.iter().enumerate() {
            if r.is_empty() {
                return Err(CnfError::EmptyClause { clause: j + 1 });
            }
            for &(i, v) in r {
                used[i] = true;
                if v < 0 {
                    alpha.set(i, j, true);
                } else {
                    alpha_bar.set(i, j, true);
                }
            }
        }
        if let Some(i) = used.iter().position(|&u| !u) {
            return Err(CnfError::UnusedVariable { variable: i + 1 });
        }
        Ok(DecompositionPair::new(alpha, alpha_bar).expect("matrices share dimensions"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn all_false(n: usize) -> Self {
        Assignment {
            values: vec![false; n],
        }
    }

    /// Variable `i` (0-based) is true iff row `i` was swapped.
    pub fn from_swaps(swaps: &SwapSet, n: usize) -> Self {
        let mut a = Assignment::all_false(n);
        for &r in swaps.rows() {
            if r < n {
                a.values[r] = true;
            }
        }
        a
    }

    /// Signed 1-based literals, one per variable.
    pub fn to_literals(&self) -> Vec<i64> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| if v { i as i64 + 1 } else { -(i as i64 + 1) })
            .collect()
    }
}

/// True iff every clause has a literal made true by `a`.
pub fn evaluate(f: &CnfFormula, a: &Assignment) -> bool {
    if f.has_empty_clause || a.values.len() != f.num_vars {
        return false;
    }
    f.clauses.iter().all(|c| {
        c.iter()
            .any(|&l| a.values[l.unsigned_abs() as usize - 1] == (l > 0))
    })
}
