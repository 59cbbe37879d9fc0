//! Complete signed graphs.
//!
//! Every unordered vertex pair carries a sign (+1 attraction, -1 repulsion)
//! and a positive weight. Pair data lives in one flat upper-triangular array
//! indexed by the rank of (i, j), i < j, in lexicographic order.

use crate::error::{CcError, Result};
use crate::partition::Partition;

/// Rank of pair (i, j), i < j, among all pairs of an n-vertex set, counting
/// (0,1), (0,2), .., (0,n-1), (1,2), .. in order.
#[inline]
pub(crate) fn pair_rank(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// A complete signed graph on n vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    n: usize,
    signs: Vec<i8>,
    weights: Vec<f64>,
    unit_weights: bool,
}

impl SignedGraph {
    /// Builds a unit-weight graph from per-pair signs in rank order.
    pub fn from_signs(n: usize, signs: Vec<i8>) -> Result<Self> {
        let m = n * (n - 1) / 2;
        let weights = vec![1.0; m];
        Self::from_parts(n, signs, weights)
    }

    /// Builds a graph from per-pair signs and weights in rank order.
    pub fn from_parts(n: usize, signs: Vec<i8>, weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(CcError::Parameter("graph needs at least one vertex".into()));
        }
        let m = n * (n - 1) / 2;
        if signs.len() != m || weights.len() != m {
            return Err(CcError::Dimension(format!(
                "expected {m} pairs for n = {n}, got {} signs and {} weights",
                signs.len(),
                weights.len()
            )));
        }
        if let Some(pos) = signs.iter().position(|s| *s != 1 && *s != -1) {
            return Err(CcError::Parameter(format!(
                "sign at pair rank {pos} is not +1 or -1"
            )));
        }
        if let Some(pos) = weights.iter().position(|w| !w.is_finite() || *w <= 0.0) {
            return Err(CcError::Parameter(format!(
                "weight at pair rank {pos} is not finite and positive"
            )));
        }
        let unit_weights = weights.iter().all(|w| *w == 1.0);
        Ok(SignedGraph {
            n,
            signs,
            weights,
            unit_weights,
        })
    }

    /// Builds a unit-weight graph by evaluating `sign` on every pair i < j.
    pub fn complete_with(n: usize, mut sign: impl FnMut(usize, usize) -> i8) -> Result<Self> {
        let mut signs = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                signs.push(sign(i, j));
            }
        }
        Self::from_signs(n, signs)
    }

    /// Builds a graph from an explicit edge list. Every pair i < j must
    /// appear exactly once. `weight` of `None` means 1.
    pub fn from_edges(n: usize, edges: &[(usize, usize, i8, Option<f64>)]) -> Result<Self> {
        if n == 0 {
            return Err(CcError::Parameter("graph needs at least one vertex".into()));
        }
        let m = n * (n - 1) / 2;
        let mut signs = vec![0i8; m];
        let mut weights = vec![0.0; m];
        for &(i, j, s, w) in edges {
            if i >= j || j >= n {
                return Err(CcError::Parameter(format!(
                    "edge ({i}, {j}) is not a pair with i < j < n = {n}"
                )));
            }
            let r = pair_rank(n, i, j);
            if signs[r] != 0 {
                return Err(CcError::Parameter(format!("duplicate edge ({i}, {j})")));
            }
            signs[r] = s;
            weights[r] = w.unwrap_or(1.0);
        }
        if let Some(r) = signs.iter().position(|s| *s == 0) {
            let (i, j) = unrank(n, r);
            return Err(CcError::Parameter(format!(
                "incomplete graph: pair ({i}, {j}) is missing"
            )));
        }
        Self::from_parts(n, signs, weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertex pairs, n(n-1)/2.
    pub fn pair_count(&self) -> usize {
        self.signs.len()
    }

    pub fn sign(&self, i: usize, j: usize) -> i8 {
        self.signs[pair_rank(self.n, i.min(j), i.max(j))]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[pair_rank(self.n, i.min(j), i.max(j))]
    }

    pub fn is_unit_weight(&self) -> bool {
        self.unit_weights
    }

    pub(crate) fn signs_raw(&self) -> &[i8] {
        &self.signs
    }

    pub(crate) fn weights_raw(&self) -> &[f64] {
        &self.weights
    }

    /// Pairs in rank order as (i, j, sign, weight).
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, i8, f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.signs.iter().zip(self.weights.iter()))
            .map(|((i, j), (&s, &w))| (i, j, s, w))
    }

    pub fn positive_count(&self) -> usize {
        self.signs.iter().filter(|s| **s > 0).count()
    }

    pub fn negative_count(&self) -> usize {
        self.signs.len() - self.positive_count()
    }

    pub fn positive_weight(&self) -> f64 {
        self.pairs().filter(|p| p.2 > 0).map(|p| p.3).sum()
    }

    pub fn negative_weight(&self) -> f64 {
        self.pairs().filter(|p| p.2 < 0).map(|p| p.3).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Total weight of frustrated pairs under `p`: negative pairs inside a
    /// module plus positive pairs across modules. This is the quantity the
    /// solver minimizes.
    pub fn imbalance(&self, p: &Partition) -> Result<f64> {
        self.check_partition(p)?;
        let mut total = 0.0;
        for (i, j, s, w) in self.pairs() {
            let together = p.same_module(i, j);
            if (s < 0 && together) || (s > 0 && !together) {
                total += w;
            }
        }
        Ok(total)
    }

    /// The frustrated pairs themselves, in rank order.
    pub fn frustrated_edges(&self, p: &Partition) -> Result<Vec<(usize, usize)>> {
        self.check_partition(p)?;
        Ok(self
            .pairs()
            .filter(|&(i, j, s, _)| {
                let together = p.same_module(i, j);
                (s < 0 && together) || (s > 0 && !together)
            })
            .map(|(i, j, _, _)| (i, j))
            .collect())
    }

    fn check_partition(&self, p: &Partition) -> Result<()> {
        if p.len() != self.n {
            return Err(CcError::Dimension(format!(
                "partition covers {} vertices, graph has {}",
                p.len(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Inverse of `pair_rank`.
pub(crate) fn unrank(n: usize, mut r: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if r < row {
            return (i, i + 1 + r);
        }
        r -= row;
    }
    unreachable!("rank out of range");
}
