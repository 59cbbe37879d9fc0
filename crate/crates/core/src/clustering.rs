//! Clustering of a solution space into classes of similar partitions.
//!
//! Solutions are points, their pairwise variation of information is the
//! dissimilarity, and k-medoids (classic PAM: greedy BUILD, then steepest
//! swap descent) groups them. Every step is deterministic: ties in distance
//! or gain always resolve to the lowest index, so no seed is involved and
//! reruns reproduce bit-identical clusterings.
//!
//! Model selection sweeps k and keeps the best mean silhouette width. The
//! sweep only accepts a split whose silhouette clears a threshold;
//! otherwise the space counts as one class when its diameter is small
//! enough, and stays unclassified when that tightness cutoff is not
//! available.

use crate::error::{CcError, Result};
use crate::metrics::DissimilarityMatrix;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

/// Structure of an optimal solution space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Exactly one optimal solution; nothing to cluster.
    UniqueSolution,
    /// Several solutions, but they form one tight cluster.
    SingleClass,
    /// Several well-separated classes of solutions.
    MultiClass,
    /// Multiple solutions with no silhouette-supported split and no
    /// tightness evidence either way.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::UniqueSolution => "UNIQUE_SOLUTION",
            Verdict::SingleClass => "SINGLE_CLASS",
            Verdict::MultiClass => "MULTI_CLASS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

impl FromStr for Verdict {
    type Err = CcError;
    fn from_str(s: &str) -> Result<Verdict> {
        match s {
            "UNIQUE_SOLUTION" => Ok(Verdict::UniqueSolution),
            "SINGLE_CLASS" => Ok(Verdict::SingleClass),
            "MULTI_CLASS" => Ok(Verdict::MultiClass),
            "INCONCLUSIVE" => Ok(Verdict::Inconclusive),
            other => Err(CcError::Parse(format!("unknown verdict {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusteringConfig {
    /// Minimum mean silhouette width for accepting a multi-class split.
    pub threshold: f64,
    /// Upper bound of the k sweep (the sweep never exceeds the point count).
    pub kmax: usize,
    /// Diameter below which an unsplit space still counts as one class.
    /// `None` means the evidence is unavailable and unsplit spaces with
    /// several solutions come out inconclusive.
    pub tightness_cutoff: Option<f64>,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            threshold: 0.51,
            kmax: 50,
            tightness_cutoff: None,
        }
    }
}

/// One k-medoids run.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Medoid point indices, ascending. Class c is the cluster around
    /// `medoids[c]`.
    pub medoids: Vec<usize>,
    /// Class of every point. Medoids belong to their own class; other
    /// points take the nearest medoid, ties to the lowest class index.
    pub assignment: Vec<usize>,
    /// Total distance from each point to its class medoid.
    pub cost: f64,
}

/// Outcome of model selection over a solution-space distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult {
    pub verdict: Verdict,
    /// Accepted class count; 1 unless the verdict is MULTI_CLASS.
    pub k: usize,
    pub medoids: Vec<usize>,
    pub assignment: Vec<usize>,
    /// Best mean silhouette width seen in the sweep (1.0 for a lone point,
    /// where no sweep exists).
    pub silhouette: f64,
    /// Mean silhouette width for every swept k, ascending in k.
    pub silhouette_by_k: Vec<(usize, f64)>,
    /// Largest pairwise distance in the space.
    pub diameter: f64,
}

impl ClusteringResult {
    pub fn class_count(&self) -> usize {
        self.k
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Classic PAM. BUILD seeds the medoids greedily (first the point with the
/// least total distance, then whichever point reduces the cost most); SWAP
/// repeatedly applies the single medoid/non-medoid exchange with the largest
/// strict cost reduction until none exists. Cost never increases across
/// accepted swaps. All ties resolve to the lowest candidate index, so the
/// run is deterministic.
pub fn k_medoids(d: &DissimilarityMatrix, k: usize) -> Result<Clustering> {
    let p = d.size();
    if k == 0 || k > p {
        return Err(CcError::Parameter(format!(
            "k = {k} outside [1, {p}] for {p} points"
        )));
    }

    // BUILD.
    let mut is_medoid = vec![false; p];
    let mut medoids = Vec::with_capacity(k);
    let first = (0..p)
        .min_by(|&a, &b| {
            let ra: f64 = (0..p).map(|j| d.get(a, j)).sum();
            let rb: f64 = (0..p).map(|j| d.get(b, j)).sum();
            ra.total_cmp(&rb)
        })
        .unwrap();
    medoids.push(first);
    is_medoid[first] = true;
    let mut nearest: Vec<f64> = (0..p).map(|j| d.get(first, j)).collect();
    while medoids.len() < k {
        let mut best_c = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for (c, _) in is_medoid.iter().enumerate().filter(|&(_, &m)| !m) {
            let gain: f64 = (0..p).map(|j| (nearest[j] - d.get(c, j)).max(0.0)).sum();
            if gain > best_gain {
                best_gain = gain;
                best_c = c;
            }
        }
        medoids.push(best_c);
        is_medoid[best_c] = true;
        for (j, near) in nearest.iter_mut().enumerate() {
            *near = near.min(d.get(best_c, j));
        }
    }

    // SWAP, steepest descent. For every candidate h one pass over the
    // points yields the exchange delta against all current medoids at once:
    // a shared accumulator collects the points that would defect to h
    // regardless of which medoid leaves, and per-medoid adjustments correct
    // the precomputed loss of removing that medoid. BUILD already places
    // the single k = 1 medoid optimally, and the second-nearest cache is
    // undefined there, so only k > 1 swaps.
    if k > 1 {
        swap_descent(d, &mut medoids, &mut is_medoid);
    }

    medoids.sort_unstable();
    let assignment = assign_to_medoids(d, &medoids);
    let cost = assignment
        .iter()
        .enumerate()
        .map(|(j, &c)| d.get(j, medoids[c]))
        .sum();
    Ok(Clustering {
        medoids,
        assignment,
        cost,
    })
}

/// Steepest-descent SWAP phase: apply the best strict-improvement
/// medoid/non-medoid exchange until none exists. Requires at least two
/// medoids (the second-nearest cache is undefined for one).
fn swap_descent(d: &DissimilarityMatrix, medoids: &mut [usize], is_medoid: &mut [bool]) {
    let p = d.size();
    let mut caches = Caches::compute(d, medoids);
    let mut guard = 0;
    loop {
        guard += 1;
        if guard > 2 * p + 50 {
            break; // float-drift safety; descent converges far earlier
        }
        let mut best_delta = 0.0;
        let mut best_swap: Option<(usize, usize)> = None;
        let mut ploss = vec![0.0f64; medoids.len()];
        for (h, _) in is_medoid.iter().enumerate().filter(|&(_, &m)| !m) {
            ploss.copy_from_slice(&caches.removal_loss);
            let mut acc = 0.0;
            for j in 0..p {
                let djh = d.get(j, h);
                let (mi, dn) = caches.near[j];
                let ds = caches.second[j];
                if djh < dn {
                    acc += djh - dn;
                    ploss[mi] += dn - ds;
                } else if djh < ds {
                    ploss[mi] += djh - ds;
                }
            }
            for (mi, &loss) in ploss.iter().enumerate() {
                let delta = loss + acc;
                if delta < best_delta {
                    best_delta = delta;
                    best_swap = Some((mi, h));
                }
            }
        }
        let Some((mi, h)) = best_swap else { break };
        let old = medoids[mi];
        is_medoid[old] = false;
        is_medoid[h] = true;
        medoids[mi] = h;
        let next = Caches::compute(d, medoids);
        if next.cost >= caches.cost {
            // The computed delta was negative but the realized cost is not
            // smaller: revert and stop rather than risk cycling.
            is_medoid[h] = false;
            is_medoid[old] = true;
            medoids[mi] = old;
            break;
        }
        caches = next;
    }
}

struct Caches {
    /// (medoid position, distance) of each point's nearest medoid.
    near: Vec<(usize, f64)>,
    /// Distance to the second nearest medoid.
    second: Vec<f64>,
    /// Cost increase of removing each medoid with no replacement.
    removal_loss: Vec<f64>,
    cost: f64,
}

impl Caches {
    fn compute(d: &DissimilarityMatrix, medoids: &[usize]) -> Caches {
        let p = d.size();
        let mut near = Vec::with_capacity(p);
        let mut second = Vec::with_capacity(p);
        let mut removal_loss = vec![0.0f64; medoids.len()];
        let mut cost = 0.0;
        for j in 0..p {
            let mut n = (usize::MAX, f64::INFINITY);
            let mut s = f64::INFINITY;
            for (mi, &m) in medoids.iter().enumerate() {
                let dist = d.get(j, m);
                if dist < n.1 {
                    s = n.1;
                    n = (mi, dist);
                } else if dist < s {
                    s = dist;
                }
            }
            cost += n.1;
            if medoids.len() > 1 {
                removal_loss[n.0] += s - n.1;
            }
            near.push(n);
            second.push(s);
        }
        Caches {
            near,
            second,
            removal_loss,
            cost,
        }
    }
}

fn assign_to_medoids(d: &DissimilarityMatrix, medoids: &[usize]) -> Vec<usize> {
    let p = d.size();
    (0..p)
        .map(|j| {
            if let Some(c) = medoids.iter().position(|&m| m == j) {
                return c; // a medoid stays in its own class
            }
            let mut best = 0;
            for (c, &m) in medoids.iter().enumerate().skip(1) {
                if d.get(j, m) < d.get(j, medoids[best]) {
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// Mean silhouette width of an assignment: per point, (b - a) / max(a, b)
/// with a the mean distance inside its own class and b the smallest mean
/// distance to another class. Points in singleton classes score 0, as do
/// points where both means vanish.
pub fn silhouette(d: &DissimilarityMatrix, assignment: &[usize]) -> Result<f64> {
    let p = d.size();
    if assignment.len() != p {
        return Err(CcError::Dimension(format!(
            "assignment covers {} points, matrix has {p}",
            assignment.len()
        )));
    }
    let k = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut sizes = vec![0usize; k];
    for &c in assignment {
        sizes[c] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(CcError::Parameter(format!("class {empty} is empty")));
    }
    if k == 1 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut sums = vec![0.0f64; k];
    for i in 0..p {
        let own = assignment[i];
        if sizes[own] == 1 {
            continue; // singleton scores 0
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..p {
            if j != i {
                sums[assignment[j]] += d.get(i, j);
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let mut b = f64::INFINITY;
        for c in 0..k {
            if c != own {
                b = b.min(sums[c] / sizes[c] as f64);
            }
        }
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / p as f64)
}

/// Sweeps k from 2 to min(p, kmax), scores each k-medoids run by mean
/// silhouette width, and turns the best into a structure verdict. Ties on
/// the silhouette keep the smallest k.
pub fn select_k(d: &DissimilarityMatrix, config: &ClusteringConfig) -> Result<ClusteringResult> {
    if config.kmax < 2 {
        return Err(CcError::Parameter(format!(
            "kmax = {} leaves nothing to sweep",
            config.kmax
        )));
    }
    if !(0.0..=1.0).contains(&config.threshold) {
        return Err(CcError::Parameter(format!(
            "threshold = {} outside [0, 1]",
            config.threshold
        )));
    }
    let p = d.size();
    if p == 1 {
        // A lone solution is its own perfectly separated class.
        return Ok(ClusteringResult {
            verdict: Verdict::UniqueSolution,
            k: 1,
            medoids: vec![0],
            assignment: vec![0],
            silhouette: 1.0,
            silhouette_by_k: Vec::new(),
            diameter: 0.0,
        });
    }

    let ks: Vec<usize> = (2..=p.min(config.kmax)).collect();
    let runs: Vec<(usize, Clustering, f64)> = ks
        .into_par_iter()
        .map(|k| {
            let c = k_medoids(d, k)?;
            let s = silhouette(d, &c.assignment)?;
            Ok((k, c, s))
        })
        .collect::<Result<_>>()?;

    let silhouette_by_k: Vec<(usize, f64)> = runs.iter().map(|(k, _, s)| (*k, *s)).collect();
    let best = runs
        .iter()
        .reduce(|a, b| if b.2 > a.2 { b } else { a })
        .expect("sweep is never empty for p > 1");
    let diameter = d.diameter();

    if best.2 >= config.threshold {
        return Ok(ClusteringResult {
            verdict: Verdict::MultiClass,
            k: best.0,
            medoids: best.1.medoids.clone(),
            assignment: best.1.assignment.clone(),
            silhouette: best.2,
            silhouette_by_k,
            diameter,
        });
    }

    // No supported split: one class around the most central point.
    let medoid = (0..p)
        .min_by(|&a, &b| {
            let ra: f64 = (0..p).map(|j| d.get(a, j)).sum();
            let rb: f64 = (0..p).map(|j| d.get(b, j)).sum();
            ra.total_cmp(&rb)
        })
        .unwrap();
    let verdict = match config.tightness_cutoff {
        Some(cutoff) if diameter <= cutoff => Verdict::SingleClass,
        Some(_) => Verdict::Inconclusive,
        None => Verdict::Inconclusive,
    };
    Ok(ClusteringResult {
        verdict,
        k: 1,
        medoids: vec![medoid],
        assignment: vec![0; p],
        silhouette: best.2,
        silhouette_by_k,
        diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Symmetric zero-diagonal rows; `entry` is drawn once per i < j pair,
    /// in (i, j) lexicographic order so seeded streams stay reproducible.
    #[allow(clippy::needless_range_loop)] // mirrored writes need both indices
    fn symmetric_rows(p: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Vec<Vec<f64>> {
        let mut rows = vec![vec![0.0; p]; p];
        for i in 0..p {
            for j in i + 1..p {
                let v = entry(i, j);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        rows
    }

    /// Two tight triplets far apart: intra 0.1, inter 10.
    fn two_blobs() -> DissimilarityMatrix {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                (0..6)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else if (i < 3) == (j < 3) {
                            0.1
                        } else {
                            10.0
                        }
                    })
                    .collect()
            })
            .collect();
        DissimilarityMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn two_blobs_split_cleanly() {
        let d = two_blobs();
        let c = k_medoids(&d, 2).unwrap();
        assert_eq!(c.assignment, vec![0, 0, 0, 1, 1, 1]);
        // a = 0.1, b = 10 for every point: s = 9.9 / 10.
        let s = silhouette(&d, &c.assignment).unwrap();
        assert!((s - 0.99).abs() < 1e-12);
    }

    #[test]
    fn select_k_accepts_the_clean_split() {
        let d = two_blobs();
        let r = select_k(&d, &ClusteringConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::MultiClass);
        assert_eq!(r.k, 2);
        assert_eq!(r.assignment, vec![0, 0, 0, 1, 1, 1]);
        assert!((r.silhouette - 0.99).abs() < 1e-12);
        assert_eq!(r.silhouette_by_k[0].0, 2);
        assert_eq!(r.diameter, 10.0);
    }

    #[test]
    fn lone_point_is_a_unique_solution() {
        let d = DissimilarityMatrix::from_rows(&[vec![0.0]]).unwrap();
        let r = select_k(&d, &ClusteringConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::UniqueSolution);
        assert_eq!(r.silhouette, 1.0);
        assert_eq!(r.assignment, vec![0]);
    }

    #[test]
    fn tight_blob_classification_depends_on_the_cutoff() {
        // One diffuse blob, no silhouette above the threshold.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows = symmetric_rows(8, |_, _| 0.05 + rng.gen_range(0.0..0.02));
        let d = DissimilarityMatrix::from_rows(&rows).unwrap();
        let with_cutoff = ClusteringConfig {
            tightness_cutoff: Some(0.5),
            ..ClusteringConfig::default()
        };
        let r = select_k(&d, &with_cutoff).unwrap();
        assert_eq!(r.verdict, Verdict::SingleClass);
        assert_eq!(r.k, 1);

        let strict = ClusteringConfig {
            tightness_cutoff: Some(0.01),
            ..ClusteringConfig::default()
        };
        assert_eq!(
            select_k(&d, &strict).unwrap().verdict,
            Verdict::Inconclusive
        );

        let unknown = ClusteringConfig::default();
        assert_eq!(
            select_k(&d, &unknown).unwrap().verdict,
            Verdict::Inconclusive
        );
    }

    #[test]
    fn swap_descent_reaches_a_swap_optimal_set() {
        // No single exchange may still lower the cost at termination.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = 12;
        let rows = symmetric_rows(p, |_, _| rng.gen_range(0.1..2.0));
        let d = DissimilarityMatrix::from_rows(&rows).unwrap();
        for k in 2..6 {
            let c = k_medoids(&d, k).unwrap();
            for h in 0..p {
                if c.medoids.contains(&h) {
                    continue;
                }
                for mi in 0..k {
                    let mut alt = c.medoids.clone();
                    alt[mi] = h;
                    alt.sort_unstable();
                    let assignment = assign_to_medoids(&d, &alt);
                    let cost: f64 = assignment
                        .iter()
                        .enumerate()
                        .map(|(j, &cl)| d.get(j, alt[cl]))
                        .sum();
                    assert!(
                        cost >= c.cost - 1e-9,
                        "swap ({mi}, {h}) improves {} to {cost}",
                        c.cost
                    );
                }
            }
        }
    }

    #[test]
    fn relabeling_points_relabels_the_classes_consistently() {
        // Tie-free matrix: permuting the points must permute the grouping.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = 9;
        let rows = symmetric_rows(p, |i, j| {
            let base = if (i < 4) == (j < 4) { 0.2 } else { 5.0 };
            base + rng.gen_range(0.0..0.01)
        });
        let d = DissimilarityMatrix::from_rows(&rows).unwrap();
        let r = select_k(&d, &ClusteringConfig::default()).unwrap();

        let perm: Vec<usize> = vec![4, 0, 7, 2, 8, 1, 5, 3, 6];
        let prow: Vec<Vec<f64>> = (0..p)
            .map(|i| (0..p).map(|j| rows[perm[i]][perm[j]]).collect())
            .collect();
        let dp = DissimilarityMatrix::from_rows(&prow).unwrap();
        let rp = select_k(&dp, &ClusteringConfig::default()).unwrap();

        assert_eq!(r.verdict, rp.verdict);
        assert_eq!(r.k, rp.k);
        for i in 0..p {
            for j in 0..p {
                assert_eq!(
                    r.assignment[perm[i]] == r.assignment[perm[j]],
                    rp.assignment[i] == rp.assignment[j],
                    "grouping differs at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn medoids_stay_in_their_own_class() {
        let d = two_blobs();
        let c = k_medoids(&d, 2).unwrap();
        for (ci, &m) in c.medoids.iter().enumerate() {
            assert_eq!(c.assignment[m], ci);
        }
    }

    #[test]
    fn singleton_classes_score_zero() {
        let d = two_blobs();
        // Force k = 6: every point alone, silhouette 0 everywhere.
        let c = k_medoids(&d, 6).unwrap();
        assert_eq!(silhouette(&d, &c.assignment).unwrap(), 0.0);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let d = two_blobs();
        assert!(k_medoids(&d, 0).is_err());
        assert!(k_medoids(&d, 7).is_err());
        assert!(silhouette(&d, &[0, 0, 0]).is_err());
        assert!(silhouette(&d, &[0, 0, 2, 2, 2, 2]).is_err());
        let bad_kmax = ClusteringConfig {
            kmax: 1,
            ..ClusteringConfig::default()
        };
        assert!(select_k(&d, &bad_kmax).is_err());
    }

    #[test]
    fn reruns_are_bit_identical() {
        let d = two_blobs();
        let a = select_k(&d, &ClusteringConfig::default()).unwrap();
        let b = select_k(&d, &ClusteringConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
