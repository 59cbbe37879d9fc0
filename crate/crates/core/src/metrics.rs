//! Information-theoretic comparison of partitions.
//!
//! The distance between two partitions is their variation of information,
//! measured in nats: the sum of the conditional entropies of each partition
//! given the other. It is a true metric on partitions of a fixed vertex set
//! and never exceeds ln n.

use crate::error::{CcError, Result};
use crate::partition::Partition;
use rayon::prelude::*;

/// Shannon entropy of the module-size distribution, in nats.
pub fn entropy(p: &Partition) -> f64 {
    let n = p.len() as f64;
    p.module_sizes()
        .iter()
        .map(|&s| {
            let q = s as f64 / n;
            -q * q.ln()
        })
        .sum()
}

/// Variation of information between two partitions of the same vertex set,
/// in nats.
///
/// Computed cell by cell over the contingency table as
/// `sum (n_ij / n) * ln(a_i * b_j / n_ij^2)`, which is H(P|Q) + H(Q|P)
/// rearranged so that identical partitions sum only ln(1) terms and come out
/// exactly 0.0. The arguments are ordered canonically before summing, so the
/// result is bitwise symmetric despite floating-point rounding.
pub fn variation_of_information(p: &Partition, q: &Partition) -> Result<f64> {
    if p.len() != q.len() {
        return Err(CcError::Dimension(format!(
            "partitions cover {} and {} vertices",
            p.len(),
            q.len()
        )));
    }
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    let n = p.len();
    let rows = p.module_count();
    let cols = q.module_count();
    let mut table = vec![0u32; rows * cols];
    for v in 0..n {
        table[p.module_of(v) * cols + q.module_of(v)] += 1;
    }
    let a = p.module_sizes();
    let b = q.module_sizes();
    let nf = n as f64;
    let mut vi = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let nij = table[i * cols + j];
            if nij == 0 {
                continue;
            }
            let nij = nij as f64;
            vi += nij / nf * ((a[i] as f64 * b[j] as f64) / (nij * nij)).ln();
        }
    }
    Ok(vi)
}

/// Symmetric matrix of pairwise variation-of-information distances over a
/// list of partitions.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    size: usize,
    /// Upper triangle in pair-rank order; the diagonal is implicitly zero.
    upper: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Computes all pairwise distances. Rows are parallelized; the result
    /// does not depend on the thread count.
    pub fn from_partitions(solutions: &[Partition]) -> Result<DissimilarityMatrix> {
        if solutions.is_empty() {
            return Err(CcError::Parameter(
                "need at least one partition for a distance matrix".into(),
            ));
        }
        let n = solutions[0].len();
        if let Some(bad) = solutions.iter().position(|s| s.len() != n) {
            return Err(CcError::Dimension(format!(
                "partition {bad} covers {} vertices, expected {n}",
                solutions[bad].len()
            )));
        }
        let p = solutions.len();
        let rows: Vec<Vec<f64>> = (0..p)
            .into_par_iter()
            .map(|i| {
                (i + 1..p)
                    .map(|j| variation_of_information(&solutions[i], &solutions[j]).unwrap())
                    .collect()
            })
            .collect();
        Ok(DissimilarityMatrix {
            size: p,
            upper: rows.concat(),
        })
    }

    /// Builds a matrix from explicit full rows, checking shape, zero
    /// diagonal and symmetry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<DissimilarityMatrix> {
        let p = rows.len();
        if p == 0 {
            return Err(CcError::Parameter("empty distance matrix".into()));
        }
        let mut upper = Vec::with_capacity(p * (p - 1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(CcError::Dimension(format!(
                    "row {i} has {} entries, expected {p}",
                    row.len()
                )));
            }
            if row[i] != 0.0 {
                return Err(CcError::Parameter(format!(
                    "diagonal entry ({i}, {i}) is {} instead of 0",
                    row[i]
                )));
            }
            for j in i + 1..p {
                if rows[j][i] != row[j] {
                    return Err(CcError::Parameter(format!(
                        "asymmetric entries at ({i}, {j})"
                    )));
                }
                if !row[j].is_finite() || row[j] < 0.0 {
                    return Err(CcError::Parameter(format!(
                        "entry ({i}, {j}) is not a finite non-negative value"
                    )));
                }
                upper.push(row[j]);
            }
        }
        Ok(DissimilarityMatrix { size: p, upper })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (i, j) = (i.min(j), i.max(j));
        self.upper[i * (2 * self.size - i - 1) / 2 + (j - i - 1)]
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.upper.iter().fold(0.0, |acc, &d| acc.max(d))
    }
}
