//! Random instances with a planted module structure.
//!
//! Construction starts from a perfectly balanced graph: `l0` modules of
//! near-equal size, positive pairs inside modules, negative pairs between
//! them. A noise step then flips pairs of well-placed edge signs, one
//! internal positive together with one external negative, so the overall
//! proportion of positive signs stays put while the planted structure decays.
//!
//! All randomness flows through ChaCha8 seeded from a single u64, so equal
//! seeds reproduce equal instances on every platform.

use crate::error::{CcError, Result};
use crate::graph::{pair_rank, SignedGraph};
use crate::partition::Partition;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameters of one random instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    /// Vertex count, at least 2.
    pub n: usize,
    /// Planted module count, between 1 and n.
    pub l0: usize,
    /// Requested proportion of misplaced edges, in [0, max_qm(n, l0)].
    pub qm: f64,
    pub seed: u64,
}

/// A generated graph together with its planted partition and the exact
/// number of misplaced (sign-flipped) edges.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub graph: SignedGraph,
    pub planted: Partition,
    pub misplaced: usize,
}

/// The planted grouping: `l0` consecutive blocks whose sizes differ by at
/// most one, larger blocks first.
pub fn planted_partition(n: usize, l0: usize) -> Result<Partition> {
    check_shape(n, l0)?;
    let base = n / l0;
    let extra = n % l0;
    let mut membership = Vec::with_capacity(n);
    for module in 0..l0 {
        let size = base + usize::from(module < extra);
        membership.extend(std::iter::repeat_n(module as u32, size));
    }
    Partition::from_membership(membership)
}

/// The perfectly balanced instance for the planted grouping: positive inside
/// modules, negative between. Its imbalance is zero by construction.
pub fn generate_balanced(n: usize, l0: usize) -> Result<GeneratedInstance> {
    let planted = planted_partition(n, l0)?;
    let graph =
        SignedGraph::complete_with(n, |i, j| if planted.same_module(i, j) { 1 } else { -1 })?;
    Ok(GeneratedInstance {
        graph,
        planted,
        misplaced: 0,
    })
}

/// Largest usable misplacement proportion for the shape (n, l0). Flips come
/// in internal/external pairs, so the proportion is capped by twice the
/// scarcer side: 2 * min(m_internal, m_external) / m.
pub fn max_qm(n: usize, l0: usize) -> Result<f64> {
    check_shape(n, l0)?;
    let m = n * (n - 1) / 2;
    let internal = internal_pair_count(n, l0);
    let external = m - internal;
    Ok(2.0 * internal.min(external) as f64 / m as f64)
}

/// Flips `k = 2 * round(qm * m / 2)` edge signs of a balanced instance:
/// k/2 internal pairs turn negative and k/2 external pairs turn positive,
/// each sampled uniformly without replacement.
pub fn introduce_imbalance(
    instance: &GeneratedInstance,
    qm: f64,
    seed: u64,
) -> Result<GeneratedInstance> {
    if instance.misplaced != 0 {
        return Err(CcError::Parameter(
            "imbalance must be introduced into a balanced instance".into(),
        ));
    }
    let n = instance.graph.n();
    let l0 = instance.planted.module_count();
    let limit = max_qm(n, l0)?;
    // Small slack absorbs the decimal-literal representation of the cap.
    if !(0.0..=limit + 1e-9).contains(&qm) {
        return Err(CcError::Parameter(format!(
            "qm = {qm} outside [0, {limit}] for n = {n}, l0 = {l0}"
        )));
    }

    let m = instance.graph.pair_count();
    let half = (qm * m as f64 / 2.0).round() as usize;

    let mut internal: Vec<usize> = Vec::new();
    let mut external: Vec<usize> = Vec::new();
    for (i, j, _, _) in instance.graph.pairs() {
        let r = pair_rank(n, i, j);
        if instance.planted.same_module(i, j) {
            internal.push(r);
        } else {
            external.push(r);
        }
    }
    debug_assert!(half <= internal.len() && half <= external.len());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signs = instance.graph.signs_raw().to_vec();
    for &r in sample_prefix(&mut rng, &mut internal, half) {
        signs[r] = -1;
    }
    for &r in sample_prefix(&mut rng, &mut external, half) {
        signs[r] = 1;
    }

    Ok(GeneratedInstance {
        graph: SignedGraph::from_signs(n, signs)?,
        planted: instance.planted.clone(),
        misplaced: 2 * half,
    })
}

/// Balanced construction followed by the noise step.
pub fn generate(config: &GeneratorConfig) -> Result<GeneratedInstance> {
    let balanced = generate_balanced(config.n, config.l0)?;
    introduce_imbalance(&balanced, config.qm, config.seed)
}

fn check_shape(n: usize, l0: usize) -> Result<()> {
    if n < 2 {
        return Err(CcError::Parameter(format!("n = {n} is below 2")));
    }
    if l0 == 0 || l0 > n {
        return Err(CcError::Parameter(format!(
            "l0 = {l0} outside [1, n = {n}]"
        )));
    }
    Ok(())
}

fn internal_pair_count(n: usize, l0: usize) -> usize {
    let base = n / l0;
    let extra = n % l0;
    extra * (base + 1) * base / 2 + (l0 - extra) * base * (base - 1) / 2
}

/// Partial Fisher-Yates: moves a uniform k-subset of `pool` to its front and
/// returns that prefix.
fn sample_prefix<'a>(rng: &mut ChaCha8Rng, pool: &'a mut [usize], k: usize) -> &'a [usize] {
    for idx in 0..k {
        let j = rng.gen_range(idx..pool.len());
        pool.swap(idx, j);
    }
    &pool[..k]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_sizes_differ_by_at_most_one() {
        let p = planted_partition(11, 3).unwrap();
        assert_eq!(p.module_sizes(), vec![4, 4, 3]);
        let p = planted_partition(12, 3).unwrap();
        assert_eq!(p.module_sizes(), vec![4, 4, 4]);
        let p = planted_partition(7, 2).unwrap();
        assert_eq!(p.module_sizes(), vec![4, 3]);
    }

    #[test]
    fn balanced_instance_has_zero_imbalance() {
        for (n, l0) in [(6, 2), (9, 3), (10, 4), (5, 1), (5, 5)] {
            let inst = generate_balanced(n, l0).unwrap();
            assert_eq!(inst.graph.imbalance(&inst.planted).unwrap(), 0.0);
        }
    }

    #[test]
    fn cap_values_for_known_shapes() {
        // Independently tallied: internal/external pair counts by hand.
        assert_eq!(max_qm(4, 2).unwrap(), 2.0 / 3.0);
        assert!((max_qm(16, 2).unwrap() - 14.0 / 15.0).abs() < 1e-15);
        assert!((max_qm(8, 3).unwrap() - 0.5).abs() < 1e-15);
        assert!((max_qm(12, 3).unwrap() - 12.0 / 22.0).abs() < 1e-15);
    }

    #[test]
    fn flip_count_and_sign_balance_are_exact() {
        for qm in [0.0, 0.05, 0.25, 0.85] {
            let config = GeneratorConfig {
                n: 16,
                l0: 2,
                qm,
                seed: 7,
            };
            let inst = generate(&config).unwrap();
            let m = inst.graph.pair_count();
            let expect = 2 * ((qm * m as f64 / 2.0).round() as usize);
            assert_eq!(inst.misplaced, expect);
            // Misplacement relative to the plant is exactly the flip count.
            assert_eq!(inst.graph.imbalance(&inst.planted).unwrap(), expect as f64);
            // Flips pair up, so the global sign counts never move.
            let balanced = generate_balanced(16, 2).unwrap();
            assert_eq!(inst.graph.positive_count(), balanced.graph.positive_count());
        }
    }

    #[test]
    fn equal_seeds_reproduce_equal_instances() {
        let config = GeneratorConfig {
            n: 12,
            l0: 3,
            qm: 0.45,
            seed: 99,
        };
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a.graph, b.graph);
        let c = generate(&GeneratorConfig {
            seed: 100,
            ..config
        })
        .unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn qm_above_the_cap_is_rejected() {
        let balanced = generate_balanced(8, 3).unwrap();
        assert!(introduce_imbalance(&balanced, 0.51, 1).is_err());
        assert!(introduce_imbalance(&balanced, 0.5, 1).is_ok());
        assert!(introduce_imbalance(&balanced, -0.1, 1).is_err());
    }

    #[test]
    fn noise_requires_a_balanced_input() {
        let noisy = generate(&GeneratorConfig {
            n: 8,
            l0: 2,
            qm: 0.25,
            seed: 3,
        })
        .unwrap();
        assert!(introduce_imbalance(&noisy, 0.1, 4).is_err());
    }

    #[test]
    fn max_qm_saturates_the_scarcer_side() {
        // At the cap every internal pair (the scarcer side at l0 = n/2
        // shapes) or external pair is flipped; construction must not panic
        // and keeps exactly k flips.
        let qm = max_qm(6, 3).unwrap();
        let inst = generate(&GeneratorConfig {
            n: 6,
            l0: 3,
            qm,
            seed: 11,
        })
        .unwrap();
        assert_eq!(inst.misplaced, (qm * 15.0).round() as usize);
    }
}
