//! Consensus across solutions and the stable cores they agree on.
//!
//! Over a set of p solutions, the consensus matrix counts for every vertex
//! pair how many solutions place it together. Counts stay integers, so
//! "always together" (count = p) and "never together" (count = 0) are exact
//! tests, never float comparisons.
//!
//! The core part is the largest vertex set on which all solutions fully
//! agree: inside it, every pair is either always together or never
//! together. Vertices that are always together collapse into blocks first
//! (the relation is transitive over a common solution set), and a maximum
//! weight clique over the never-together relation between blocks, weighted
//! by block size, picks the largest consistent union of blocks.

use crate::error::{CcError, Result};
use crate::partition::Partition;

/// Pairwise co-occurrence counts over a fixed solution list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsensusMatrix {
    n: usize,
    solutions: usize,
    /// Upper triangle in pair-rank order.
    counts: Vec<u32>,
}

impl ConsensusMatrix {
    pub fn from_solutions(solutions: &[Partition]) -> Result<ConsensusMatrix> {
        if solutions.is_empty() {
            return Err(CcError::Parameter(
                "need at least one solution for a consensus".into(),
            ));
        }
        let n = solutions[0].len();
        if let Some(bad) = solutions.iter().position(|s| s.len() != n) {
            return Err(CcError::Dimension(format!(
                "solution {bad} covers {} vertices, expected {n}",
                solutions[bad].len()
            )));
        }
        let mut counts = vec![0u32; n * (n - 1) / 2];
        for s in solutions {
            let mut r = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if s.same_module(i, j) {
                        counts[r] += 1;
                    }
                    r += 1;
                }
            }
        }
        Ok(ConsensusMatrix {
            n,
            solutions: solutions.len(),
            counts,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn solution_count(&self) -> usize {
        self.solutions
    }

    /// Raw co-occurrence count of a pair.
    pub fn count(&self, i: usize, j: usize) -> u32 {
        let (i, j) = (i.min(j), i.max(j));
        self.counts[i * (2 * self.n - i - 1) / 2 + (j - i - 1)]
    }

    /// Fraction of solutions placing the pair together; 1.0 on the diagonal.
    pub fn frequency(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        self.count(i, j) as f64 / self.solutions as f64
    }

    pub fn always_together(&self, i: usize, j: usize) -> bool {
        i == j || self.count(i, j) as usize == self.solutions
    }

    pub fn never_together(&self, i: usize, j: usize) -> bool {
        i != j && self.count(i, j) == 0
    }
}

/// The largest vertex set all solutions agree on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorePart {
    /// Core vertices, ascending.
    pub vertices: Vec<usize>,
    /// The blocks of always-together vertices making up the core, each
    /// ascending, ordered by their smallest vertex.
    pub blocks: Vec<Vec<usize>>,
    /// True when another block union of the same size also qualified and
    /// the lexicographically smallest vertex set was reported.
    pub tie_broken: bool,
}

impl CorePart {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Core size over vertex count.
    pub fn fraction(&self, n: usize) -> f64 {
        self.vertices.len() as f64 / n as f64
    }
}

/// Computes the core part of a solution list: the maximum-cardinality vertex
/// set in which every pair is together in all solutions or apart in all
/// solutions. Ties between equally large sets resolve to the
/// lexicographically smallest vertex list and are flagged.
pub fn core_part(solutions: &[Partition]) -> Result<CorePart> {
    let consensus = ConsensusMatrix::from_solutions(solutions)?;
    core_part_of(&consensus)
}

pub fn core_part_of(consensus: &ConsensusMatrix) -> Result<CorePart> {
    let n = consensus.n();
    if n > 64 {
        return Err(CcError::Parameter(format!(
            "core extraction supports up to 64 vertices, got {n}"
        )));
    }

    // Blocks of always-together vertices. The relation is transitive here:
    // two pairs held together by every solution chain through their common
    // vertex in each solution.
    let mut block_of = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if block_of[i] != usize::MAX {
            continue;
        }
        let b = blocks.len();
        block_of[i] = b;
        let mut members = vec![i];
        for (j, owner) in block_of.iter_mut().enumerate().skip(i + 1) {
            if *owner == usize::MAX && consensus.always_together(i, j) {
                *owner = b;
                members.push(j);
            }
        }
        blocks.push(members);
    }

    // Two blocks are compatible when every cross pair is never together.
    // Within a block all rows of the consensus matrix coincide, so one
    // representative pair decides; the full check stays as a debug assert.
    let b = blocks.len();
    let mut adj = vec![0u64; b];
    for x in 0..b {
        for y in x + 1..b {
            let apart = consensus.never_together(blocks[x][0], blocks[y][0]);
            debug_assert!(
                blocks[x].iter().all(|&i| blocks[y]
                    .iter()
                    .all(|&j| consensus.never_together(i, j) == apart)),
                "consensus rows diverge inside a block"
            );
            if apart {
                adj[x] |= 1 << y;
                adj[y] |= 1 << x;
            }
        }
    }
    let weights: Vec<usize> = blocks.iter().map(|m| m.len()).collect();

    let mut best = Best {
        weight: 0,
        vertices: Vec::new(),
        clique: 0,
        tied: false,
    };
    let all: u64 = if b == 64 { !0 } else { (1 << b) - 1 };
    bron_kerbosch(&adj, &weights, &blocks, 0, all, 0, &mut best);

    let mut members: Vec<usize> = Vec::new();
    let mut out_blocks: Vec<Vec<usize>> = Vec::new();
    for (x, block) in blocks.iter().enumerate() {
        if best.clique & (1 << x) != 0 {
            members.extend(block);
            out_blocks.push(block.clone());
        }
    }
    members.sort_unstable();
    out_blocks.sort_by_key(|m| m[0]);
    Ok(CorePart {
        vertices: members,
        blocks: out_blocks,
        tie_broken: best.tied,
    })
}

struct Best {
    weight: usize,
    vertices: Vec<usize>,
    clique: u64,
    tied: bool,
}

/// Maximal-clique enumeration with pivoting over the block graph; every
/// maximal clique is scored by total vertex weight. Block counts are small
/// (at most n), so bitmask sets suffice.
fn bron_kerbosch(
    adj: &[u64],
    weights: &[usize],
    blocks: &[Vec<usize>],
    r: u64,
    p: u64,
    x: u64,
    best: &mut Best,
) {
    if p == 0 && x == 0 {
        let weight: usize = ones(r).map(|v| weights[v]).sum();
        if weight < best.weight {
            return;
        }
        let mut vertices: Vec<usize> = ones(r).flat_map(|v| blocks[v].iter().copied()).collect();
        vertices.sort_unstable();
        if weight > best.weight {
            best.weight = weight;
            best.vertices = vertices;
            best.clique = r;
            best.tied = false;
        } else if vertices != best.vertices {
            best.tied = true;
            if vertices < best.vertices {
                best.vertices = vertices;
                best.clique = r;
            }
        }
        return;
    }
    // Pivot on the candidate dominating the most of p; ties take the lowest
    // index, keeping the walk deterministic.
    let mut pivot = usize::MAX;
    let mut covered = u64::MAX;
    for v in ones(p | x) {
        let c = (p & !adj[v]).count_ones() as u64;
        if pivot == usize::MAX || c < covered {
            pivot = v;
            covered = c;
        }
    }
    let mut candidates = p & !adj[pivot];
    let mut p = p;
    let mut x = x;
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        bron_kerbosch(adj, weights, blocks, r | bit, p & adj[v], x & adj[v], best);
        // v moves from the candidates to the excluded set for the branches
        // that follow.
        candidates &= !bit;
        p &= !bit;
        x |= bit;
    }
}

fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(labelings: &[&[u32]]) -> Vec<Partition> {
        labelings
            .iter()
            .map(|m| Partition::canonicalize(m).unwrap())
            .collect()
    }

    #[test]
    fn consensus_counts_are_exact() {
        let sols = parts(&[&[0, 1, 1], &[0, 0, 1]]);
        let c = ConsensusMatrix::from_solutions(&sols).unwrap();
        assert_eq!(c.count(1, 2), 1);
        assert_eq!(c.count(0, 1), 1);
        assert_eq!(c.count(0, 2), 0);
        assert!(c.never_together(0, 2));
        assert!(!c.always_together(0, 1));
        assert_eq!(c.frequency(0, 1), 0.5);
        assert_eq!(c.frequency(2, 2), 1.0);
    }

    #[test]
    fn single_solution_core_is_everything() {
        let sols = parts(&[&[0, 0, 1, 2, 2]]);
        let core = core_part(&sols).unwrap();
        assert_eq!(core.vertices, vec![0, 1, 2, 3, 4]);
        assert_eq!(core.blocks.len(), 3);
        assert!(!core.tie_broken);
    }

    #[test]
    fn disagreeing_vertex_drops_out() {
        // Vertex 2 hops between modules; the rest never move.
        let sols = parts(&[&[0, 0, 0, 1, 1], &[0, 0, 1, 1, 1]]);
        let core = core_part(&sols).unwrap();
        assert_eq!(core.vertices, vec![0, 1, 3, 4]);
        assert_eq!(core.blocks, vec![vec![0, 1], vec![3, 4]]);
        assert!(!core.tie_broken);
    }

    #[test]
    fn tie_reports_the_lexicographically_smallest_set() {
        // Two solutions on 2 vertices, together in one and apart in the
        // other: both singleton sets are maximal with weight 1.
        let sols = parts(&[&[0, 0], &[0, 1]]);
        let core = core_part(&sols).unwrap();
        assert_eq!(core.vertices, vec![0]);
        assert!(core.tie_broken);
    }

    #[test]
    fn core_prefers_weight_over_block_count() {
        // Blocks {0,1,2} and singletons {3}, {4} with pair (3,4) unstable:
        // the 3-vertex block beats any union of the two singletons only if
        // they conflict with it; make them conflict-free with the block but
        // mutually unstable, so the best set is {0,1,2} plus one singleton.
        let sols = parts(&[&[0, 0, 0, 1, 2], &[0, 0, 0, 1, 1]]);
        let core = core_part(&sols).unwrap();
        // (3,4) disagree across solutions; both are apart from the block.
        assert_eq!(core.vertices, vec![0, 1, 2, 3]);
        assert!(core.tie_broken, "either singleton completes the core");
    }

    #[test]
    fn empty_solution_list_is_rejected() {
        assert!(core_part(&[]).is_err());
        assert!(ConsensusMatrix::from_solutions(&[]).is_err());
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let a = Partition::single_module(3);
        let b = Partition::single_module(4);
        assert!(ConsensusMatrix::from_solutions(&[a, b]).is_err());
    }
}
