//! The paired-decomposition model: two `n × m` bit matrices, one row pair
//! per ordered pair of subsets, one column per set element.
//!
//! Row `i` of the α matrix is the α-component of pair `i`, row `i` of the ᾱ
//! matrix its complementary component. Both row and column views are kept,
//! since the graph procedures alternate between scanning a row for its
//! elements and scanning a column for the rows that hold it.
//!
//! Indices are 0-based in the API. Reports ([`Violation`], the trace, the
//! verdict reasons) print them 1-based.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitMatrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompositionError {
    #[error("matrix dimensions differ: α is {alpha_rows}×{alpha_cols}, ᾱ is {bar_rows}×{bar_cols}")]
    DimensionMismatch {
        alpha_rows: usize,
        alpha_cols: usize,
        bar_rows: usize,
        bar_cols: usize,
    },
    #[error("row {row} is outside 1..={n}")]
    RowOutOfRange { row: usize, n: usize },
    #[error("ragged or malformed matrix row {row}")]
    MalformedRow { row: usize },
}

/// One failed validity condition together with its witnessing index
/// (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Element `column` lies in both components of pair `row`.
    Overlap { row: usize, column: usize },
    /// Both components of pair `row` are empty.
    EmptyPair { row: usize },
    /// Element `column` lies in no component of any pair.
    UncoveredElement { column: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Overlap { row, column } => {
                write!(f, "disjointness violated at row {row}, column {column}")
            }
            Violation::EmptyPair { row } => write!(f, "pair {row} is empty on both sides"),
            Violation::UncoveredElement { column } => {
                write!(f, "element {column} is in no component")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-column 1-counts of the α and ᾱ matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnCounts {
    pub alpha: Vec<usize>,
    pub alpha_bar: Vec<usize>,
}

/// A set of pair indices whose components are to be exchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SwapSet {
    rows: Vec<usize>,
}

impl SwapSet {
    pub fn new<I: IntoIterator<Item = usize>>(rows: I) -> Self {
        let mut rows: Vec<usize> = rows.into_iter().collect();
        rows.sort_unstable();
        rows.dedup();
        SwapSet { rows }
    }

    /// Builds a swap set from 1-based indices; `None` if any index is 0.
    pub fn from_one_based<I: IntoIterator<Item = usize>>(rows: I) -> Option<Self> {
        let mut out = Vec::new();
        for r in rows {
            out.push(r.checked_sub(1)?);
        }
        Some(SwapSet::new(out))
    }

    pub fn contains(&self, row: usize) -> bool {
        self.rows.binary_search(&row).is_ok()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct DecompositionPair {
    alpha: BitMatrix,
    alpha_bar: BitMatrix,
    alpha_rows: Vec<Vec<usize>>,
    alpha_bar_rows: Vec<Vec<usize>>,
    alpha_cols: Vec<Vec<usize>>,
    alpha_bar_cols: Vec<Vec<usize>>,
}

impl fmt::Debug for DecompositionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecompositionPair")
            .field("alpha", &self.alpha)
            .field("alpha_bar", &self.alpha_bar)
            .finish()
    }
}

impl DecompositionPair {
    pub fn new(alpha: BitMatrix, alpha_bar: BitMatrix) -> Result<Self, DecompositionError> {
        if alpha.rows() != alpha_bar.rows() || alpha.cols() != alpha_bar.cols() {
            return Err(DecompositionError::DimensionMismatch {
                alpha_rows: alpha.rows(),
                alpha_cols: alpha.cols(),
                bar_rows: alpha_bar.rows(),
                bar_cols: alpha_bar.cols(),
            });
        }
        let mut pair = DecompositionPair {
            alpha,
            alpha_bar,
            alpha_rows: Vec::new(),
            alpha_bar_rows: Vec::new(),
            alpha_cols: Vec::new(),
            alpha_bar_cols: Vec::new(),
        };
        pair.reindex();
        Ok(pair)
    }

    /// Parses rows written as strings of `0`/`1` characters, e.g.
    /// `from_strs(&["10", "00"], &["01", "10"])`.
    pub fn from_strs(alpha: &[&str], alpha_bar: &[&str]) -> Result<Self, DecompositionError> {
        fn parse(rows: &[&str], cols: usize) -> Result<BitMatrix, DecompositionError> {
            let mut m = BitMatrix::zeros(rows.len(), cols);
            for (i, r) in rows.iter().enumerate() {
                if r.len() != cols {
                    return Err(DecompositionError::MalformedRow { row: i + 1 });
                }
                for (j, c) in r.bytes().enumerate() {
                    match c {
                        b'1' => m.set(i, j, true),
                        b'0' => {}
                        _ => return Err(DecompositionError::MalformedRow { row: i + 1 }),
                    }
                }
            }
            Ok(m)
        }
        let cols = alpha
            .first()
            .or(alpha_bar.first())
            .map_or(0, |r| r.len());
        DecompositionPair::new(parse(alpha, cols)?, parse(alpha_bar, cols)?)
    }

    fn reindex(&mut self) {
        let (n, m) = (self.alpha.rows(), self.alpha.cols());
        self.alpha_rows = (0..n).map(|i| self.alpha.row_ones(i).collect()).collect();
        self.alpha_bar_rows = (0..n).map(|i| self.alpha_bar.row_ones(i).collect()).collect();
        self.alpha_cols = vec![Vec::new(); m];
        self.alpha_bar_cols = vec![Vec::new(); m];
        for i in 0..n {
            for &j in &self.alpha_rows[i] {
                self.alpha_cols[j].push(i);
            }
            for &j in &self.alpha_bar_rows[i] {
                self.alpha_bar_cols[j].push(i);
            }
        }
    }

    /// Number of pairs (rows).
    #[inline]
    pub fn n(&self) -> usize {
        self.alpha.rows()
    }

    /// Number of set elements (columns).
    #[inline]
    pub fn m(&self) -> usize {
        self.alpha.cols()
    }

    pub fn alpha(&self) -> &BitMatrix {
        &self.alpha
    }

    pub fn alpha_bar(&self) -> &BitMatrix {
        &self.alpha_bar
    }

    #[inline]
    pub fn alpha_at(&self, row: usize, col: usize) -> bool {
        self.alpha.get(row, col)
    }

    #[inline]
    pub fn alpha_bar_at(&self, row: usize, col: usize) -> bool {
        self.alpha_bar.get(row, col)
    }

    /// Columns holding a 1 in α-row `row`, ascending.
    #[inline]
    pub fn alpha_row(&self, row: usize) -> &[usize] {
        &self.alpha_rows[row]
    }

    #[inline]
    pub fn alpha_bar_row(&self, row: usize) -> &[usize] {
        &self.alpha_bar_rows[row]
    }

    /// Rows holding a 1 in α-column `col`, ascending.
    #[inline]
    pub fn alpha_col(&self, col: usize) -> &[usize] {
        &self.alpha_cols[col]
    }

    #[inline]
    pub fn alpha_bar_col(&self, col: usize) -> &[usize] {
        &self.alpha_bar_cols[col]
    }

    /// Checks disjointness, pair nonemptiness and coverage, reporting every
    /// violation found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for i in 0..self.n() {
            let a = self.alpha.row_words(i);
            let b = self.alpha_bar.row_words(i);
            for (wi, (x, y)) in a.iter().zip(b).enumerate() {
                let mut both = x & y;
                while both != 0 {
                    let bit = both.trailing_zeros() as usize;
                    both &= both - 1;
                    violations.push(Violation::Overlap {
                        row: i + 1,
                        column: wi * 64 + bit + 1,
                    });
                }
            }
        }
        for i in 0..self.n() {
            if self.alpha_rows[i].is_empty() && self.alpha_bar_rows[i].is_empty() {
                violations.push(Violation::EmptyPair { row: i + 1 });
            }
        }
        for j in 0..self.m() {
            if self.alpha_cols[j].is_empty() && self.alpha_bar_cols[j].is_empty() {
                violations.push(Violation::UncoveredElement { column: j + 1 });
            }
        }
        ValidationReport { violations }
    }

    pub fn column_counts(&self) -> ColumnCounts {
        ColumnCounts {
            alpha: self.alpha_cols.iter().map(Vec::len).collect(),
            alpha_bar: self.alpha_bar_cols.iter().map(Vec::len).collect(),
        }
    }

    /// Returns the pair with the components of every row in `swaps`
    /// exchanged.
    pub fn apply_swaps(&self, swaps: &SwapSet) -> Result<Self, DecompositionError> {
        if let Some(&r) = swaps.rows().iter().find(|&&r| r >= self.n()) {
            return Err(DecompositionError::RowOutOfRange {
                row: r + 1,
                n: self.n(),
            });
        }
        let mut alpha = self.alpha.clone();
        let mut alpha_bar = self.alpha_bar.clone();
        for &r in swaps.rows() {
            alpha.swap_row_with(&mut alpha_bar, r);
        }
        DecompositionPair::new(alpha, alpha_bar)
    }

    /// Exchanges the roles of the two sides for every row.
    pub fn mirrored(&self) -> Self {
        DecompositionPair {
            alpha: self.alpha_bar.clone(),
            alpha_bar: self.alpha.clone(),
            alpha_rows: self.alpha_bar_rows.clone(),
            alpha_bar_rows: self.alpha_rows.clone(),
            alpha_cols: self.alpha_bar_cols.clone(),
            alpha_bar_cols: self.alpha_cols.clone(),
        }
    }

    /// True iff every column of the α matrix holds at least one 1.
    pub fn is_alpha_covering(&self) -> bool {
        self.alpha_cols.iter().all(|c| !c.is_empty())
    }

    /// Total number of 1s across both matrices.
    pub fn input_length(&self) -> usize {
        self.alpha.count_ones() + self.alpha_bar.count_ones()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> DecompositionPair {
        DecompositionPair::from_strs(&["10", "00"], &["01", "10"]).unwrap()
    }

    #[test]
    fn smallest_valid_decomposition() {
        let p = DecompositionPair::from_strs(&["1"], &["0"]).unwrap();
        assert!(p.validate().is_ok());
    }

    #[test]
    fn overlap_reported_with_position() {
        let p = DecompositionPair::from_strs(&["1"], &["1"]).unwrap();
        assert_eq!(
            p.validate().violations,
            vec![Violation::Overlap { row: 1, column: 1 }]
        );
    }

    #[test]
    fn empty_pair_reported() {
        let p = DecompositionPair::from_strs(&["1", "0"], &["0", "0"]).unwrap();
        assert_eq!(
            p.validate().violations,
            vec![Violation::EmptyPair { row: 2 }]
        );
    }

    #[test]
    fn all_violations_reported() {
        let p = DecompositionPair::from_strs(&["110", "000"], &["100", "000"]).unwrap();
        assert_eq!(
            p.validate().violations,
            vec![
                Violation::Overlap { row: 1, column: 1 },
                Violation::EmptyPair { row: 2 },
                Violation::UncoveredElement { column: 3 },
            ]
        );
    }

    #[test]
    fn dimension_mismatch_is_structural_error() {
        let a = BitMatrix::zeros(2, 3);
        let b = BitMatrix::zeros(2, 2);
        assert!(matches!(
            DecompositionPair::new(a, b),
            Err(DecompositionError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn counts_of_e1() {
        let c = e1().column_counts();
        assert_eq!(c.alpha, vec![1, 0]);
        assert_eq!(c.alpha_bar, vec![1, 1]);
    }

    #[test]
    fn all_zero_alpha_counts() {
        let p = DecompositionPair::from_strs(&["00", "00"], &["10", "01"]).unwrap();
        assert_eq!(p.column_counts().alpha, vec![0, 0]);
    }

    #[test]
    fn swapping_every_row_exchanges_counts() {
        let p = e1();
        let all = SwapSet::new(0..p.n());
        let c0 = p.column_counts();
        let c1 = p.apply_swaps(&all).unwrap().column_counts();
        assert_eq!(c0.alpha, c1.alpha_bar);
        assert_eq!(c0.alpha_bar, c1.alpha);
    }

    #[test]
    fn swaps_on_e1() {
        let p = e1();
        assert_eq!(p.apply_swaps(&SwapSet::default()).unwrap(), p);
        let s = SwapSet::from_one_based([1, 2]).unwrap();
        let q = p.apply_swaps(&s).unwrap();
        assert_eq!(q, DecompositionPair::from_strs(&["01", "10"], &["10", "00"]).unwrap());
        assert_eq!(q.apply_swaps(&s).unwrap(), p);
        assert!(q.is_alpha_covering());
        assert!(!p.is_alpha_covering());
    }

    #[test]
    fn swap_out_of_range() {
        let err = e1().apply_swaps(&SwapSet::new([2])).unwrap_err();
        assert_eq!(err, DecompositionError::RowOutOfRange { row: 3, n: 2 });
    }

    #[test]
    fn input_length_counts_all_ones() {
        // (¬x1 ∨ x2) ∧ (x1): three literal occurrences.
        assert_eq!(e1().input_length(), 3);
        let z = DecompositionPair::from_strs(&["00"], &["00"]).unwrap();
        assert_eq!(z.input_length(), 0);
    }

    #[test]
    fn swap_set_from_one_based_rejects_zero() {
        assert!(SwapSet::from_one_based([0]).is_none());
        assert_eq!(SwapSet::from_one_based([3, 1, 3]).unwrap().rows(), &[0, 2]);
    }
}
