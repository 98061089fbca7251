//! Exhaustive generation of plane trees and exact index sums.
//!
//! Trees of size `n` correspond to Dyck words with `n - 1` pairs (the
//! children of the root); they are produced in lexicographic order with
//! `(` before `)` by an in-place successor step.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::monomial::{Monomial, TagError};
use crate::tree::{indices_from_bits, IndexBundle, Tree};

pub const DEFAULT_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("tree size must be at least 1")]
    ZeroSize,
    #[error("size {n} exceeds the enumeration cap {cap}")]
    OverCap { n: usize, cap: usize },
    #[error(transparent)]
    Tag(#[from] TagError),
}

/// Number of plane trees on `n` vertices, `C(2n-2, n-1) / n`.
pub fn tree_count(n: usize) -> BigUint {
    assert!(n >= 1, "a tree has at least one vertex");
    binomial(2 * n - 2, n - 1) / BigUint::from(n)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

/// Dyck words with a fixed number of pairs, in lexicographic order.
#[derive(Debug, Clone)]
pub struct DyckWords {
    word: Option<Vec<bool>>,
}

impl DyckWords {
    pub fn new(pairs: usize) -> Self {
        let mut w = vec![true; pairs];
        w.resize(2 * pairs, false);
        DyckWords { word: Some(w) }
    }
}

/// Advance `w` to the next Dyck word; `false` when `w` was the last one.
pub fn next_dyck_word(w: &mut [bool]) -> bool {
    let pairs = w.len() / 2;
    let mut opens = w.iter().filter(|&&b| b).count();
    let mut closes = w.len() - opens;
    for i in (0..w.len()).rev() {
        if w[i] {
            opens -= 1;
        } else {
            closes -= 1;
        }
        // opens/closes now count the prefix w[..i]
        if w[i] && opens > closes {
            w[i] = false;
            let fill_opens = pairs - opens;
            for (j, slot) in w[i + 1..].iter_mut().enumerate() {
                *slot = j < fill_opens;
            }
            return true;
        }
    }
    false
}

impl Iterator for DyckWords {
    type Item = Vec<bool>;

    fn next(&mut self) -> Option<Vec<bool>> {
        let current = self.word.take()?;
        let mut next = current.clone();
        if next_dyck_word(&mut next) {
            self.word = Some(next);
        }
        Some(current)
    }
}

/// Full encodings (root pair included) of all trees on `n` vertices.
#[derive(Debug, Clone)]
pub struct TreeEncodings {
    inner: DyckWords,
}

impl Iterator for TreeEncodings {
    type Item = Vec<bool>;

    fn next(&mut self) -> Option<Vec<bool>> {
        self.inner.next().map(|w| {
            let mut bits = Vec::with_capacity(w.len() + 2);
            bits.push(true);
            bits.extend(w);
            bits.push(false);
            bits
        })
    }
}

fn check_size(n: usize, cap: usize) -> Result<(), EnumerateError> {
    if n == 0 {
        Err(EnumerateError::ZeroSize)
    } else if n > cap {
        Err(EnumerateError::OverCap { n, cap })
    } else {
        Ok(())
    }
}

pub fn encodings_of_size(n: usize, cap: usize) -> Result<TreeEncodings, EnumerateError> {
    check_size(n, cap)?;
    Ok(TreeEncodings {
        inner: DyckWords::new(n - 1),
    })
}

/// Every tree on `n` vertices exactly once, in lexicographic encoding order.
pub fn trees_of_size(n: usize) -> Result<impl Iterator<Item = Tree>, EnumerateError> {
    trees_of_size_capped(n, DEFAULT_CAP)
}

pub fn trees_of_size_capped(
    n: usize,
    cap: usize,
) -> Result<impl Iterator<Item = Tree>, EnumerateError> {
    Ok(encodings_of_size(n, cap)?.map(|bits| Tree::from_valid_bits(&bits)))
}

/// Index bundles of all trees on `n` vertices.
pub fn bundles_of_size(
    n: usize,
    cap: usize,
) -> Result<impl Iterator<Item = IndexBundle>, EnumerateError> {
    Ok(encodings_of_size(n, cap)?.map(|bits| indices_from_bits(&bits)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateRow {
    pub n: usize,
    pub count: BigUint,
    /// Sum over all trees of each requested monomial, in request order.
    pub sums: Vec<(Monomial, BigUint)>,
}

impl AggregateRow {
    pub fn get(&self, m: &Monomial) -> Option<&BigUint> {
        self.sums.iter().find(|(k, _)| k == m).map(|(_, v)| v)
    }
}

pub fn aggregate(n: usize, monomials: &[Monomial]) -> Result<AggregateRow, EnumerateError> {
    aggregate_capped(n, monomials, DEFAULT_CAP)
}

pub fn aggregate_capped(
    n: usize,
    monomials: &[Monomial],
    cap: usize,
) -> Result<AggregateRow, EnumerateError> {
    let mut count = BigUint::zero();
    let mut sums = vec![BigUint::zero(); monomials.len()];
    for b in bundles_of_size(n, cap)? {
        count += 1u32;
        for (acc, m) in sums.iter_mut().zip(monomials) {
            *acc += m.eval(&b);
        }
    }
    Ok(AggregateRow {
        n,
        count,
        sums: monomials.iter().cloned().zip(sums).collect(),
    })
}

/// Parse tags and aggregate in one step.
pub fn aggregate_tags(n: usize, tags: &[&str]) -> Result<AggregateRow, EnumerateError> {
    let monomials = tags
        .iter()
        .map(|t| t.parse())
        .collect::<Result<Vec<Monomial>, _>>()?;
    aggregate(n, &monomials)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(x: &BigUint) -> u64 {
        u64::try_from(x).unwrap()
    }

    #[test]
    fn counts_match_catalan() {
        assert_eq!(trees_of_size(1).unwrap().count(), 1);
        assert_eq!(trees_of_size(4).unwrap().count(), 5);
        assert_eq!(trees_of_size(5).unwrap().count(), 14);
        assert_eq!(u(&tree_count(5)), 14);
        assert_eq!(u(&tree_count(16)), 9_694_845);
    }

    #[test]
    fn lexicographic_order() {
        let all: Vec<String> = trees_of_size(4).unwrap().map(|t| t.encode()).collect();
        assert_eq!(
            all,
            ["(((())))", "((()()))", "((())())", "(()(()))", "(()()())"]
        );
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(all.first().unwrap(), "(((())))");
        assert_eq!(all.last().unwrap(), "(()()())");
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            trees_of_size(17).err(),
            Some(EnumerateError::OverCap { n: 17, cap: 16 })
        ));
        assert!(matches!(trees_of_size(0).err(), Some(EnumerateError::ZeroSize)));
    }

    #[test]
    fn aggregate_examples() {
        let row = aggregate_tags(3, &["sigma", "sigma*z", "rho", "w"]).unwrap();
        let vals: Vec<u64> = row.sums.iter().map(|(_, v)| u(v)).collect();
        assert_eq!(vals, [10, 30, 12, 8]);
        assert_eq!(u(&row.count), 2);
        let row = aggregate_tags(2, &["w"]).unwrap();
        assert_eq!(u(&row.sums[0].1), 1);
    }

    #[test]
    fn unknown_tag_is_reported() {
        let err = aggregate_tags(3, &["sigma", "omega"]).unwrap_err();
        assert!(err.to_string().contains("omega"));
    }
}
