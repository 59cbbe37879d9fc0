//! Partitions of `{0, .., n-1}` in canonical form.
//!
//! A partition is stored as a membership vector in restricted-growth form:
//! vertex 0 is in module 0, and every later vertex either joins a module seen
//! before or opens the next unused index. Two partitions describe the same
//! grouping if and only if their canonical vectors are equal, so equality,
//! hashing and ordering all work structurally.

use crate::error::{CcError, Result};
use std::fmt;

/// A partition of `{0, .., n-1}` into non-empty modules, kept in
/// restricted-growth (first-appearance) form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    membership: Vec<u32>,
    module_count: usize,
}

impl Partition {
    /// Accepts a membership vector already in restricted-growth form.
    /// Rejects anything else so that distinct `Partition` values never
    /// describe the same grouping.
    pub fn from_membership(membership: Vec<u32>) -> Result<Self> {
        if membership.is_empty() {
            return Err(CcError::Parameter("empty membership vector".into()));
        }
        let mut next = 0u32;
        for (i, &m) in membership.iter().enumerate() {
            if m > next {
                return Err(CcError::Parameter(format!(
                    "membership not in restricted-growth form at position {i}: \
                     got {m}, expected at most {next}"
                )));
            }
            if m == next {
                next += 1;
            }
        }
        Ok(Partition {
            membership,
            module_count: next as usize,
        })
    }

    /// Relabels arbitrary module labels by first appearance, producing the
    /// canonical representative of the grouping they describe.
    pub fn canonicalize(labels: &[u32]) -> Result<Self> {
        if labels.is_empty() {
            return Err(CcError::Parameter("empty membership vector".into()));
        }
        let mut map: Vec<Option<u32>> = Vec::new();
        let mut membership = Vec::with_capacity(labels.len());
        let mut next = 0u32;
        for &lab in labels {
            let lab = lab as usize;
            if lab >= map.len() {
                map.resize(lab + 1, None);
            }
            let m = *map[lab].get_or_insert_with(|| {
                let m = next;
                next += 1;
                m
            });
            membership.push(m);
        }
        Ok(Partition {
            membership,
            module_count: next as usize,
        })
    }

    /// Everything alone: n singleton modules.
    pub fn singletons(n: usize) -> Self {
        Partition {
            membership: (0..n as u32).collect(),
            module_count: n,
        }
    }

    /// Everything together: one module.
    pub fn single_module(n: usize) -> Self {
        Partition {
            membership: vec![0; n],
            module_count: if n == 0 { 0 } else { 1 },
        }
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.membership.len()
    }

    pub fn is_empty(&self) -> bool {
        self.membership.is_empty()
    }

    /// Number of modules.
    pub fn module_count(&self) -> usize {
        self.module_count
    }

    /// Module index of vertex `i`.
    pub fn module_of(&self, i: usize) -> usize {
        self.membership[i] as usize
    }

    pub fn same_module(&self, i: usize, j: usize) -> bool {
        self.membership[i] == self.membership[j]
    }

    /// The canonical membership vector.
    pub fn membership(&self) -> &[u32] {
        &self.membership
    }

    /// Sizes of modules 0..module_count. Every entry is positive.
    pub fn module_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.module_count];
        for &m in &self.membership {
            sizes[m as usize] += 1;
        }
        sizes
    }

    /// Modules as sorted vertex lists, ordered by module index.
    pub fn modules(&self) -> Vec<Vec<usize>> {
        let mut mods = vec![Vec::new(); self.module_count];
        for (v, &m) in self.membership.iter().enumerate() {
            mods[m as usize].push(v);
        }
        mods
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.membership.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Iterator over all partitions of `{0, .., n-1}` in lexicographic order of
/// their restricted-growth vectors. Yields the Bell number of partitions, so
/// keep n small.
pub fn all_partitions(n: usize) -> AllPartitions {
    AllPartitions {
        a: vec![0; n],
        prefix_max: vec![0; n],
        n,
        started: false,
        done: n == 0,
    }
}

pub struct AllPartitions {
    a: Vec<u32>,
    // prefix_max[i] = max(a[0..i]); prefix_max[0] is unused padding.
    prefix_max: Vec<u32>,
    n: usize,
    started: bool,
    done: bool,
}

impl Iterator for AllPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(Partition::from_membership(self.a.clone()).unwrap());
        }
        // Find the rightmost position that can still grow: a[i] may take any
        // value up to prefix_max[i] + 1.
        let mut i = self.n;
        loop {
            if i <= 1 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.a[i] <= self.prefix_max[i] {
                break;
            }
        }
        self.a[i] += 1;
        for k in i + 1..self.n {
            self.a[k] = 0;
            self.prefix_max[k] = self.prefix_max[k - 1].max(self.a[k - 1]);
        }
        Some(Partition::from_membership(self.a.clone()).unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_relabels_by_first_appearance() {
        let p = Partition::canonicalize(&[2, 2, 0, 1]).unwrap();
        assert_eq!(p.membership(), &[0, 0, 1, 2]);
        assert_eq!(p.module_count(), 3);
    }

    #[test]
    fn canonical_vectors_are_fixed_points() {
        let p = Partition::canonicalize(&[0, 1, 0, 2, 1]).unwrap();
        let q = Partition::canonicalize(p.membership()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn from_membership_rejects_label_gaps() {
        assert!(Partition::from_membership(vec![0, 2]).is_err());
        assert!(Partition::from_membership(vec![1]).is_err());
        assert!(Partition::from_membership(vec![]).is_err());
        assert!(Partition::from_membership(vec![0, 1, 1, 2, 0]).is_ok());
    }

    #[test]
    fn sizes_and_modules_agree() {
        let p = Partition::from_membership(vec![0, 1, 1, 0, 2]).unwrap();
        assert_eq!(p.module_sizes(), vec![2, 2, 1]);
        assert_eq!(p.modules(), vec![vec![0, 3], vec![1, 2], vec![4]]);
        assert!(p.same_module(1, 2));
        assert!(!p.same_module(0, 4));
    }

    #[test]
    fn enumeration_counts_match_bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in bell.iter().enumerate().skip(1) {
            assert_eq!(all_partitions(n).count(), b, "n = {n}");
        }
    }

    #[test]
    fn enumeration_is_strictly_increasing_and_canonical() {
        let all: Vec<Partition> = all_partitions(5).collect();
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
        for p in &all {
            assert_eq!(
                p,
                &Partition::canonicalize(p.membership()).unwrap(),
                "non-canonical vector emitted"
            );
        }
    }

    #[test]
    fn extremes() {
        let s = Partition::singletons(4);
        assert_eq!(s.module_count(), 4);
        let m = Partition::single_module(4);
        assert_eq!(m.module_count(), 1);
        assert_eq!(m.to_string(), "0 0 0 0");
    }
}
