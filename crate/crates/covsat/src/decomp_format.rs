//! The `.decomp` text format for raw decompositions.
//!
//! ```text
//! 2 2
//! 10
//! 00
//!
//! 01
//! 10
//! ```
//!
//! The first line is `n m`, then `n` rows of the α matrix, a blank line and
//! `n` rows of the ᾱ matrix, each row `m` characters from `{0, 1}`.

use covsat_core::{DecompositionError, DecompositionPair};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompFormatError {
    #[error("line {line}: {detail}")]
    Syntax { line: usize, detail: String },
    #[error(transparent)]
    Structure(#[from] DecompositionError),
}

pub fn parse(text: &str) -> Result<DecompositionPair, DecompFormatError> {
    let syntax = |line: usize, detail: &str| DecompFormatError::Syntax {
        line,
        detail: detail.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (hl, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| syntax(1, "missing 'n m' header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| syntax(hl, "bad dimension")))
        .collect::<Result<_, _>>()?;
    let [n, m] = dims[..] else {
        return Err(syntax(hl, "expected 'n m'"));
    };

    let mut read_block = |what: &str| -> Result<Vec<String>, DecompFormatError> {
        let mut rows = Vec::with_capacity(n);
        for (line, l) in lines.by_ref() {
            if l.is_empty() {
                if rows.is_empty() {
                    continue;
                }
                break;
            }
            if l.len() != m || !l.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(syntax(line, &format!("{what} row must be {m} characters of 0/1")));
            }
            rows.push(l.to_string());
            if rows.len() == n {
                break;
            }
        }
        if rows.len() != n {
            return Err(syntax(hl, &format!("expected {n} {what} rows, found {}", rows.len())));
        }
        Ok(rows)
    };
    let alpha = read_block("α")?;
    let alpha_bar = read_block("ᾱ")?;
    let a: Vec<&str> = alpha.iter().map(String::as_str).collect();
    let b: Vec<&str> = alpha_bar.iter().map(String::as_str).collect();
    Ok(DecompositionPair::from_strs(&a, &b)?)
}

pub fn emit(pair: &DecompositionPair) -> String {
    let mut s = format!("{} {}\n", pair.n(), pair.m());
    let row = |bits: &dyn Fn(usize) -> bool| -> String {
        (0..pair.m()).map(|j| if bits(j) { '1' } else { '0' }).collect()
    };
    for i in 0..pair.n() {
        s.push_str(&row(&|j| pair.alpha_at(i, j)));
        s.push('\n');
    }
    s.push('\n');
    for i in 0..pair.n() {
        s.push_str(&row(&|j| pair.alpha_bar_at(i, j)));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_e1() {
        let text = "2 2\n10\n00\n\n01\n10\n";
        let p = parse(text).unwrap();
        assert_eq!(p, DecompositionPair::from_strs(&["10", "00"], &["01", "10"]).unwrap());
        assert_eq!(emit(&p), text);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            parse("1 2\n1\n\n01\n"),
            Err(DecompFormatError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse("2 1\n1\n"),
            Err(DecompFormatError::Syntax { .. })
        ));
        assert!(parse("").is_err());
    }
}
