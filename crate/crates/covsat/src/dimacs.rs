//! DIMACS CNF reading and canonical writing.

use std::fmt::Write;

use covsat_core::{CnfError, CnfFormula, PreprocessReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimacsError {
    #[error("line {line}: malformed header: {detail}")]
    MalformedHeader { line: usize, detail: String },
    #[error("line {line}: missing 'p cnf' header")]
    MissingHeader { line: usize },
    #[error("line {line}: bad token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {literal} outside 1..={num_vars}")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        num_vars: usize,
    },
    #[error("line {line}: header declares {declared} clauses, found {found}")]
    ClauseCountMismatch {
        line: usize,
        declared: usize,
        found: usize,
    },
}

/// Parses DIMACS text and preprocesses the clauses.
///
/// Lines starting with `c` are comments and a line starting with `%` ends
/// the input. A final clause without its terminating `0` is accepted.
pub fn parse(text: &str) -> Result<(CnfFormula, PreprocessReport), DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut clause_lines: Vec<usize> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut current_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        if t.starts_with('%') {
            break;
        }
        if t.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::MalformedHeader {
                    line,
                    detail: "second header".into(),
                });
            }
            header = Some(parse_header(t, line)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(DimacsError::MissingHeader { line });
        };
        for tok in t.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| DimacsError::BadToken {
                line,
                token: tok.to_string(),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
                clause_lines.push(if current_line == 0 { line } else { current_line });
                current_line = 0;
                continue;
            }
            if lit.unsigned_abs() as usize > num_vars {
                return Err(DimacsError::LiteralOutOfRange {
                    line,
                    literal: lit,
                    num_vars,
                });
            }
            if current.is_empty() {
                current_line = line;
            }
            current.push(lit);
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }

    let Some((num_vars, declared)) = header else {
        return Err(DimacsError::MissingHeader {
            line: last_line.max(1),
        });
    };
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCountMismatch {
            line: last_line.max(1),
            declared,
            found: clauses.len(),
        });
    }
    CnfFormula::preprocess(num_vars, clauses).map_err(|e| match e {
        CnfError::LiteralOutOfRange {
            clause,
            literal,
            num_vars,
        } => DimacsError::LiteralOutOfRange {
            line: clause_lines.get(clause - 1).copied().unwrap_or(last_line),
            literal,
            num_vars,
        },
        other => DimacsError::BadToken {
            line: last_line,
            token: other.to_string(),
        },
    })
}

fn parse_header(t: &str, line: usize) -> Result<(usize, usize), DimacsError> {
    let parts: Vec<&str> = t.split_whitespace().collect();
    let bad = |detail: &str| DimacsError::MalformedHeader {
        line,
        detail: detail.to_string(),
    };
    if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
        return Err(bad("expected 'p cnf <vars> <clauses>'"));
    }
    let n = parts[2].parse().map_err(|_| bad("variable count"))?;
    let m = parts[3].parse().map_err(|_| bad("clause count"))?;
    Ok((n, m))
}

/// Writes `f` in canonical form: literals sorted by variable (negative
/// first), one clause per line, an empty clause as a bare `0`.
pub fn emit(f: &CnfFormula) -> String {
    let m = f.clauses.len() + usize::from(f.has_empty_clause);
    let mut s = String::with_capacity(16 + f.literal_count() * 4);
    let _ = writeln!(s, "p cnf {} {}", f.num_vars, m);
    for c in f.canonical_clauses() {
        for l in c {
            let _ = write!(s, "{l} ");
        }
        s.push_str("0\n");
    }
    if f.has_empty_clause {
        s.push_str("0\n");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_e1() {
        let (f, _) = parse("p cnf 2 2\n-1 2 0\n1 0\n").unwrap();
        assert_eq!(f.clauses, vec![vec![-1, 2], vec![1]]);
    }

    #[test]
    fn tautology_dropped() {
        let (f, r) = parse("p cnf 1 1\n1 -1 0\n").unwrap();
        assert!(f.clauses.is_empty());
        assert_eq!(r.removed_tautologies, vec![1]);
    }

    #[test]
    fn empty_clause() {
        let (f, r) = parse("p cnf 1 2\n1 0\n0\n").unwrap();
        assert!(r.empty_clause_found);
        assert_eq!(emit(&f), "p cnf 1 2\n1 0\n0\n");
    }

    #[test]
    fn comments_percent_and_missing_final_zero() {
        let (f, _) = parse("c hello\np cnf 3 2\n1 -3\n 0 2\n%\n0\n").unwrap();
        assert_eq!(f.clauses, vec![vec![1, -3], vec![2]]);
    }

    #[test]
    fn clause_spanning_lines() {
        let (f, _) = parse("p cnf 3 1\n1\n2\n3 0\n").unwrap();
        assert_eq!(f.clauses, vec![vec![1, 2, 3]]);
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(
            parse("p cnf x 1\n1 0\n"),
            Err(DimacsError::MalformedHeader { line: 1, .. })
        ));
        assert_eq!(
            parse("p cnf 2 1\n\n1 3 0\n"),
            Err(DimacsError::LiteralOutOfRange {
                line: 3,
                literal: 3,
                num_vars: 2
            })
        );
        assert!(matches!(
            parse("p cnf 2 3\n1 0\n"),
            Err(DimacsError::ClauseCountMismatch {
                declared: 3,
                found: 1,
                ..
            })
        ));
        assert_eq!(parse("1 0\n"), Err(DimacsError::MissingHeader { line: 1 }));
        assert!(matches!(
            parse("p cnf 2 1\n1 x 0\n"),
            Err(DimacsError::BadToken { line: 2, .. })
        ));
    }

    #[test]
    fn canonical_emit_sorts_literals() {
        let (f, _) = parse("p cnf 3 1\n3 -1 2 0\n").unwrap();
        assert_eq!(emit(&f), "p cnf 3 1\n-1 2 3 0\n");
    }
}
