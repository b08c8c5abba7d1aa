use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

/// An ordered list of 1-based basis indices whose first `skew_arity` slots
/// are subject to antisymmetrization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub indices: Vec<usize>,
    pub skew_arity: usize,
}

impl MultiIndex {
    pub fn new(indices: Vec<usize>, skew_arity: usize) -> Self {
        assert!(skew_arity <= indices.len(), "skew block longer than index");
        Self {
            indices,
            skew_arity,
        }
    }

    /// Sorts the skew block ascending and returns the permutation sign.
    ///
    /// The sign is 0 when an index repeats inside the skew block; the block
    /// is still sorted in that case. Trailing slots are left untouched.
    pub fn canonicalize(&self, dim: usize) -> Result<(MultiIndex, i8)> {
        if let Some(&index) = self.indices.iter().find(|&&i| i == 0 || i > dim) {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut indices = self.indices.clone();
        let sign = sort_skew(&mut indices[..self.skew_arity]);
        Ok((MultiIndex::new(indices, self.skew_arity), sign))
    }

    pub fn is_canonical(&self) -> bool {
        self.indices[..self.skew_arity]
            .windows(2)
            .all(|w| w[0] < w[1])
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.indices.iter().join(","))
    }
}

/// Sorts `block` in place and returns the sign of the sorting permutation,
/// or 0 if two entries coincide.
pub fn sort_skew(block: &mut [usize]) -> i8 {
    let mut sign = 1i8;
    for i in 1..block.len() {
        let mut j = i;
        while j > 0 && block[j - 1] > block[j] {
            block.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if block.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// Strictly increasing `k`-subsets of `1..=n` in lexicographic order.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    (1..=n).combinations(k).collect()
}

/// All `k`-tuples over `1..=n` in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (0..k).map(|_| 1..=n).multi_cartesian_product().collect()
}

/// Binomial coefficient; 0 when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Position of a strictly increasing 1-based subset in the lexicographic
/// order produced by [`increasing_tuples`].
pub fn subset_rank(n: usize, subset: &[usize]) -> usize {
    let k = subset.len();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &s) in subset.iter().enumerate() {
        for skipped in prev + 1..s {
            rank += binomial(n - skipped, k - i - 1);
        }
        prev = s;
    }
    rank
}
