//! Co-membership (pair indicator) view of a partition.
//!
//! A partition of n vertices induces one binary variable per vertex pair:
//! 1 when the pair shares a module, 0 otherwise. A 0/1 pair vector is the
//! image of a partition exactly when every vertex triple has zero, one or
//! three of its pair variables set; two set and one unset is the transitivity
//! violation the integer-programming view forbids with triangle constraints.

use crate::error::{CcError, Result};
use crate::graph::{pair_rank, SignedGraph};
use crate::partition::Partition;

/// Pair indicator vector over all unordered pairs of n vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comembership {
    n: usize,
    x: Vec<bool>,
}

impl Comembership {
    /// Builds the vector from raw pair bits in rank order.
    pub fn from_bits(n: usize, x: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(CcError::Parameter("need at least one vertex".into()));
        }
        let m = n * (n - 1) / 2;
        if x.len() != m {
            return Err(CcError::Dimension(format!(
                "expected {m} pair bits for n = {n}, got {}",
                x.len()
            )));
        }
        Ok(Comembership { n, x })
    }

    /// Projects a partition to its pair indicators.
    pub fn from_partition(p: &Partition) -> Self {
        let n = p.len();
        let mut x = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                x.push(p.same_module(i, j));
            }
        }
        Comembership { n, x }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.x[pair_rank(self.n, i.min(j), i.max(j))]
    }

    /// Recovers the partition this vector encodes, or reports the first
    /// vertex triple (in lexicographic order) that breaks transitivity.
    pub fn to_partition(&self) -> Result<Partition> {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let ij = self.get(i, j) as u8;
                    let ik = self.get(i, k) as u8;
                    let jk = self.get(j, k) as u8;
                    if ij + ik + jk == 2 {
                        return Err(CcError::InvalidComembership { i, j, k });
                    }
                }
            }
        }
        // Transitive, so connected components of the 1-pairs are modules.
        let mut labels = vec![u32::MAX; n];
        let mut next = 0u32;
        for i in 0..n {
            if labels[i] != u32::MAX {
                continue;
            }
            labels[i] = next;
            for (j, label) in labels.iter_mut().enumerate().skip(i + 1) {
                if self.get(i, j) {
                    *label = next;
                }
            }
            next += 1;
        }
        Partition::canonicalize(&labels)
    }
}

impl SignedGraph {
    /// Linear objective of the pair-variable program: weight of negative
    /// pairs placed together plus weight of positive pairs split apart.
    /// Agrees with `imbalance` whenever `x` encodes a partition.
    pub fn ilp_objective(&self, x: &Comembership) -> Result<f64> {
        if x.n() != self.n() {
            return Err(CcError::Dimension(format!(
                "pair vector covers {} vertices, graph has {}",
                x.n(),
                self.n()
            )));
        }
        let mut total = 0.0;
        for (i, j, s, w) in self.pairs() {
            if s < 0 {
                if x.get(i, j) {
                    total += w;
                }
            } else if !x.get(i, j) {
                total += w;
            }
        }
        Ok(total)
    }
}
