//! Seeded random CNF instances and the exhaustive small-formula space.

use std::ops::RangeInclusive;

use covsat_core::CnfFormula;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub vars: RangeInclusive<usize>,
    pub clauses: RangeInclusive<usize>,
    pub width: RangeInclusive<usize>,
    /// Flip literal signs so a hidden assignment satisfies every clause.
    pub planted: bool,
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), String> {
        let check = |name: &str, r: &RangeInclusive<usize>, min: usize| {
            if r.is_empty() || *r.start() < min {
                Err(format!("{name} range {}..{} is empty or below {min}", r.start(), r.end()))
            } else {
                Ok(())
            }
        };
        check("vars", &self.vars, 1)?;
        check("clauses", &self.clauses, 0)?;
        check("width", &self.width, 1)
    }
}

/// Instance `index` of the stream for `cfg.seed`. Each index has its own
/// ChaCha stream, so instances do not depend on one another.
pub fn random_cnf(cfg: &FuzzConfig, index: u64) -> CnfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let n = rng.random_range(cfg.vars.clone());
    let m = rng.random_range(cfg.clauses.clone());
    let hidden: Vec<bool> = (0..n).map(|_| rng.random()).collect();
    let mut clauses = Vec::with_capacity(m);
    for _ in 0..m {
        let w = rng.random_range(cfg.width.clone());
        let vars: Vec<usize> = if w <= n {
            sample(&mut rng, n, w).into_iter().collect()
        } else {
            (0..w).map(|_| rng.random_range(0..n)).collect()
        };
        let mut clause: Vec<i64> = vars
            .iter()
            .map(|&v| if rng.random() { v as i64 + 1 } else { -(v as i64 + 1) })
            .collect();
        if cfg.planted {
            let sat = |l: i64| hidden[l.unsigned_abs() as usize - 1] == (l > 0);
            if !clause.iter().any(|&l| sat(l)) {
                let k = rng.random_range(0..clause.len());
                clause[k] = -clause[k];
            }
        }
        clauses.push(clause);
    }
    CnfFormula::new(n, clauses).expect("generated literals are in range")
}

/// Every non-tautological clause over `n` variables with 1..=`max_width`
/// distinct variables, in a fixed order.
pub fn all_clauses(n: usize, max_width: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for subset in 1u32..(1 << n) {
        let vars: Vec<i64> = (0..n).filter(|&i| subset >> i & 1 == 1).map(|i| i as i64 + 1).collect();
        if vars.len() > max_width {
            continue;
        }
        for signs in 0u32..(1 << vars.len()) {
            out.push(
                vars.iter()
                    .enumerate()
                    .map(|(k, &v)| if signs >> k & 1 == 1 { -v } else { v })
                    .collect(),
            );
        }
    }
    out
}

/// Calls `visit` on every multiset of at most `max_m` clauses drawn from
/// [`all_clauses`]`(n, max_width)`, as a formula over `n` variables.
pub fn for_each_small_formula(n: usize, max_m: usize, max_width: usize, mut visit: impl FnMut(CnfFormula)) {
    let pool = all_clauses(n, max_width);
    let mut picked: Vec<usize> = Vec::with_capacity(max_m);
    fn rec(
        start: usize,
        pool: &[Vec<i64>],
        picked: &mut Vec<usize>,
        max_m: usize,
        n: usize,
        visit: &mut dyn FnMut(CnfFormula),
    ) {
        let clauses = picked.iter().map(|&i| pool[i].clone()).collect();
        visit(CnfFormula::new(n, clauses).expect("pool literals are in range"));
        if picked.len() == max_m {
            return;
        }
        for i in start..pool.len() {
            picked.push(i);
            rec(i, pool, picked, max_m, n, visit);
            picked.pop();
        }
    }
    rec(0, &pool, &mut picked, max_m, n, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FuzzConfig {
        FuzzConfig {
            seed: 7,
            count: 10,
            vars: 1..=8,
            clauses: 1..=20,
            width: 1..=3,
            planted: false,
        }
    }

    #[test]
    fn deterministic_per_index() {
        assert_eq!(random_cnf(&cfg(), 3), random_cnf(&cfg(), 3));
        assert_ne!(random_cnf(&cfg(), 3), random_cnf(&cfg(), 4));
    }

    #[test]
    fn unit_space() {
        let c = FuzzConfig {
            vars: 1..=1,
            clauses: 2..=2,
            width: 1..=1,
            ..cfg()
        };
        for i in 0..50 {
            let f = random_cnf(&c, i);
            assert_eq!(f.num_vars, 1);
            assert_eq!(f.clauses.len(), 2);
            assert!(f.clauses.iter().all(|c| c.len() == 1));
        }
    }

    #[test]
    fn small_space_sizes() {
        assert_eq!(all_clauses(3, 3).len(), 26);
        assert_eq!(all_clauses(2, 2).len(), 8);
        let mut count = 0;
        for_each_small_formula(3, 4, 3, |_| count += 1);
        assert_eq!(count, 27_405);
    }

    #[test]
    fn bad_ranges_rejected() {
        #[allow(clippy::reversed_empty_ranges)]
        let c = FuzzConfig { vars: 3..=2, ..cfg() };
        assert!(c.validate().is_err());
        assert!(cfg().validate().is_ok());
    }
}
