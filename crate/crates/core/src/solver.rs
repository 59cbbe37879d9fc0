//! Exact minimization and exhaustive enumeration of optimal partitions.
//!
//! The search branches on vertices in a fixed order. A node at depth d fixes
//! the modules of the first d vertices; children assign vertex d to each
//! module already used, or to the next fresh index. Restricting labels this
//! way visits every partition exactly once and in restricted-growth form, so
//! no symmetry breaking or deduplication is needed afterwards.
//!
//! Solving runs in two phases:
//! 1. best-first search over the node bounds proves the optimum. The first
//!    complete assignment popped from the frontier is optimal because its
//!    value is a lower bound for everything still queued.
//! 2. depth-first search re-walks the tree keeping every node whose bound
//!    does not exceed the optimum (ties must survive) and emits every leaf
//!    that attains it exactly.
//!
//! The node bound adds the frustration already fixed among assigned vertices
//! to a relaxation of what the unassigned ones must still pay: unassigned
//! vertices are grouped into disjoint consecutive pairs, and each pair
//! simultaneously picks the cheapest joint attachment (both to one module,
//! to two different ones, or to fresh modules, counting the pair's own edge).
//! Edges between different pairs are ignored, so the bound never exceeds the
//! cost of any completion. It dominates the simpler per-vertex attachment
//! bound exposed as [`lower_bound`].
//!
//! All arithmetic is plain f64 addition. With integer weights (unit weights
//! in particular) every value the search compares is exact, so equality
//! tests against the optimum are exact; arbitrary fractional weights get the
//! usual floating-point caveat.

use crate::error::{CcError, Result};
use crate::graph::{pair_rank, SignedGraph};
use crate::partition::{all_partitions, Partition};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

/// Hard cap on instance size; keeps search nodes inline and allocation-free.
pub const MAX_SOLVER_N: usize = 40;

/// Largest n the exhaustive reference enumeration accepts (Bell numbers grow
/// too fast beyond this).
pub const MAX_EXHAUSTIVE_N: usize = 13;

/// Deepest level the enumeration tree is pre-split at for parallel work.
const MAX_SPLIT_DEPTH: usize = 6;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Most solutions retained by enumeration; hitting the cap marks the
    /// space incomplete but keeps a deterministic prefix of it.
    pub enumeration_limit: usize,
    pub time_limit: Option<Duration>,
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            enumeration_limit: 100_000,
            time_limit: None,
            threads: 1,
        }
    }
}

/// Search effort counters. Node counts and wall time depend on thread count
/// and machine; never compare them across runs.
#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub wall: Duration,
    pub note: Option<String>,
}

/// Every partition attaining the optimum, sorted by membership vector.
#[derive(Debug, Clone)]
pub struct SolutionSpace {
    pub optimum: f64,
    pub solutions: Vec<Partition>,
    /// False when the enumeration limit or time limit truncated the list.
    pub complete: bool,
    pub stats: SearchStats,
}

/// Proves the minimum imbalance and returns one partition attaining it.
pub fn solve_optimum(g: &SignedGraph, config: &SolverConfig) -> Result<(f64, Partition)> {
    validate(g, config)?;
    let n = g.n();
    if n == 1 {
        return Ok((0.0, Partition::single_module(1)));
    }
    let start = Instant::now();
    let deadline = config.time_limit.map(|d| start + d);
    let order = assignment_order(g);
    let (signs, weights) = permuted_pairs(g, &order);
    let mut state = State::new(n, &signs, &weights);

    let (mut upper, _incumbent) = greedy_descend(&mut state);

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    state.assign(0);
    let root_bound = state.bound();
    state.unassign();
    heap.push(Node::new(root_bound, &[0]));

    while let Some(node) = heap.pop() {
        if let Some(d) = deadline {
            if Instant::now() >= d {
                return Err(CcError::TimeLimit {
                    best_bound: node.bound,
                });
            }
        }
        if node.bound > upper {
            continue; // stale: pushed before the incumbent tightened
        }
        if node.len as usize == n {
            // Exact value of this leaf is minimal over the whole frontier,
            // and every unexplored partition sits under some frontier node.
            return Ok((node.bound, to_original(node.prefix(), &order)));
        }
        state.morph_to(node.prefix());
        let mc = state.module_count;
        for c in 0..=mc {
            state.assign(c);
            let b = state.bound();
            if b <= upper {
                if state.depth == n && b < upper {
                    upper = b;
                }
                heap.push(Node::new(b, &state.memb[..state.depth]));
            }
            state.unassign();
        }
    }
    Err(CcError::CrossCheck(
        "search frontier drained without reaching an optimal leaf".into(),
    ))
}

/// Enumerates every partition whose imbalance equals `optimum`, which must
/// be the exact minimum (as returned by [`solve_optimum`]). A target above
/// the minimum is detected and rejected; a target below it yields an empty,
/// annotated space.
pub fn enumerate_optima(
    g: &SignedGraph,
    optimum: f64,
    config: &SolverConfig,
) -> Result<SolutionSpace> {
    validate(g, config)?;
    if !optimum.is_finite() || optimum < 0.0 {
        return Err(CcError::Parameter(format!(
            "target imbalance {optimum} is not a finite non-negative value"
        )));
    }
    let n = g.n();
    let start = Instant::now();
    let deadline = config.time_limit.map(|d| start + d);
    let order = assignment_order(g);
    let (signs, weights) = permuted_pairs(g, &order);
    let mut nodes = 0u64;

    let frontier = {
        let mut state = State::new(n, &signs, &weights);
        let target = if config.threads == 1 {
            1
        } else {
            4 * config.threads
        };
        build_frontier(&mut state, optimum, target, &mut nodes)
    };

    let timed_out = AtomicBool::new(false);
    let run = |prefix: &Vec<u8>| -> Task {
        let mut state = State::new(n, &signs, &weights);
        state.morph_to(prefix);
        let mut task = Task {
            nodes: 0,
            sols: Vec::new(),
            capped: false,
            below: None,
        };
        dfs(
            &mut state,
            optimum,
            config.enumeration_limit,
            &order,
            deadline,
            &timed_out,
            &mut task,
        );
        task
    };

    let tasks: Vec<Task> = if config.threads == 1 || frontier.len() <= 1 {
        frontier.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| CcError::Parameter(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            frontier.par_iter().map(run).collect()
        })
    };

    // Tasks cover lexicographic blocks of the tree in frontier order, and a
    // capped task still holds the first solutions of its own block, so the
    // concatenation truncated to the cap is the same list any thread count
    // produces.
    let mut complete = !timed_out.load(AtomicOrdering::Relaxed);
    let mut capped = false;
    let mut below: Option<f64> = None;
    let mut solutions: Vec<Partition> = Vec::new();
    for t in &tasks {
        nodes += t.nodes;
        capped |= t.capped;
        below = match (below, t.below) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (x, y) => x.or(y),
        };
    }
    if let Some(b) = below {
        return Err(CcError::CrossCheck(format!(
            "enumeration target {optimum} exceeds the optimum: \
             found a partition with imbalance {b}"
        )));
    }
    for mut t in tasks {
        if solutions.len() >= config.enumeration_limit {
            capped = true;
            break;
        }
        let room = config.enumeration_limit - solutions.len();
        if t.sols.len() > room {
            t.sols.truncate(room);
            capped = true;
        }
        solutions.append(&mut t.sols);
    }
    if capped {
        complete = false;
    }
    solutions.sort_unstable();
    solutions.dedup();

    // The branching scheme cannot emit a wrong leaf; recompute against the
    // plain imbalance definition anyway so a defect here can never ship a
    // bad solution set.
    for s in &solutions {
        let v = g.imbalance(s)?;
        if v != optimum {
            return Err(CcError::CrossCheck(format!(
                "emitted partition has imbalance {v}, expected {optimum}"
            )));
        }
    }

    let note = if timed_out.load(AtomicOrdering::Relaxed) {
        Some("time limit hit; the solution list is truncated".into())
    } else if capped {
        Some("enumeration limit reached; the solution list is truncated".into())
    } else if solutions.is_empty() {
        Some("no partition attains the target; it lies below the optimum".into())
    } else {
        None
    };
    Ok(SolutionSpace {
        optimum,
        solutions,
        complete,
        stats: SearchStats {
            nodes,
            wall: start.elapsed(),
            note,
        },
    })
}

/// [`solve_optimum`] followed by [`enumerate_optima`].
pub fn solve(g: &SignedGraph, config: &SolverConfig) -> Result<SolutionSpace> {
    let (optimum, _witness) = solve_optimum(g, config)?;
    enumerate_optima(g, optimum, config)
}

/// Reference implementation: scans every partition and keeps the minimum.
/// Shares nothing with the branch-and-bound machinery, so agreement between
/// the two is meaningful evidence. Guarded to n <= [`MAX_EXHAUSTIVE_N`].
pub fn brute_force_optima(g: &SignedGraph) -> Result<SolutionSpace> {
    let n = g.n();
    if n > MAX_EXHAUSTIVE_N {
        return Err(CcError::ExhaustiveGuard {
            n,
            max: MAX_EXHAUSTIVE_N,
        });
    }
    let start = Instant::now();
    let mut best = f64::INFINITY;
    let mut solutions = Vec::new();
    let mut count = 0u64;
    for p in all_partitions(n) {
        count += 1;
        let v = g.imbalance(&p)?;
        if v < best {
            best = v;
            solutions.clear();
            solutions.push(p);
        } else if v == best {
            solutions.push(p);
        }
    }
    Ok(SolutionSpace {
        optimum: best,
        solutions,
        complete: true,
        stats: SearchStats {
            nodes: count,
            wall: start.elapsed(),
            note: None,
        },
    })
}

/// Per-vertex attachment bound for a membership prefix over vertices
/// `0..prefix.len()` in natural order: frustration fixed inside the prefix
/// plus, for each unassigned vertex, the cheapest single attachment (to an
/// existing module or a fresh one). Never exceeds the imbalance of any
/// partition extending the prefix, and equals the imbalance when the prefix
/// is complete.
pub fn lower_bound(g: &SignedGraph, prefix: &[u32]) -> Result<f64> {
    let n = g.n();
    let t = prefix.len();
    if t > n {
        return Err(CcError::Dimension(format!(
            "prefix covers {t} vertices, graph has {n}"
        )));
    }
    let mut next = 0u32;
    for (i, &m) in prefix.iter().enumerate() {
        if m > next {
            return Err(CcError::Parameter(format!(
                "prefix not in restricted-growth form at position {i}"
            )));
        }
        if m == next {
            next += 1;
        }
    }
    let mc = next as usize;

    let mut total = 0.0;
    for i in 0..t {
        for j in i + 1..t {
            let together = prefix[i] == prefix[j];
            let s = g.sign(i, j);
            if (s < 0 && together) || (s > 0 && !together) {
                total += g.weight(i, j);
            }
        }
    }
    for u in t..n {
        let mut pos_total = 0.0;
        let mut neg_to = vec![0.0; mc];
        let mut pos_to = vec![0.0; mc];
        for (j, &label) in prefix.iter().enumerate().take(t) {
            let w = g.weight(u, j);
            let c = label as usize;
            if g.sign(u, j) > 0 {
                pos_total += w;
                pos_to[c] += w;
            } else {
                neg_to[c] += w;
            }
        }
        let mut cheapest = pos_total; // open a fresh module
        for c in 0..mc {
            cheapest = cheapest.min(neg_to[c] + pos_total - pos_to[c]);
        }
        total += cheapest;
    }
    Ok(total)
}

fn validate(g: &SignedGraph, config: &SolverConfig) -> Result<()> {
    if g.n() > MAX_SOLVER_N {
        return Err(CcError::Parameter(format!(
            "n = {} exceeds the solver limit {MAX_SOLVER_N}",
            g.n()
        )));
    }
    if config.threads == 0 {
        return Err(CcError::Parameter("thread count must be positive".into()));
    }
    if config.enumeration_limit == 0 {
        return Err(CcError::Parameter(
            "enumeration limit must be positive".into(),
        ));
    }
    Ok(())
}

/// Branching order: vertices with heavy ties to the already-ordered set go
/// first so bounds tighten early. Unit-weight graphs keep natural order.
fn assignment_order(g: &SignedGraph) -> Vec<usize> {
    let n = g.n();
    if g.is_unit_weight() {
        return (0..n).collect();
    }
    let totals: Vec<f64> = (0..n)
        .map(|u| (0..n).filter(|&v| v != u).map(|v| g.weight(u, v)).sum())
        .collect();
    let mut chosen = vec![false; n];
    let mut attached = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    for step in 0..n {
        let key: &[f64] = if step == 0 { &totals } else { &attached };
        let mut best = usize::MAX;
        for u in 0..n {
            if !chosen[u] && (best == usize::MAX || key[u] > key[best]) {
                best = u;
            }
        }
        chosen[best] = true;
        order.push(best);
        for v in 0..n {
            if !chosen[v] {
                attached[v] += g.weight(best, v);
            }
        }
    }
    order
}

fn permuted_pairs(g: &SignedGraph, order: &[usize]) -> (Vec<i8>, Vec<f64>) {
    if order.iter().enumerate().all(|(i, &v)| i == v) {
        return (g.signs_raw().to_vec(), g.weights_raw().to_vec());
    }
    let n = g.n();
    let m = n * (n - 1) / 2;
    let mut signs = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for a in 0..n {
        for b in a + 1..n {
            signs.push(g.sign(order[a], order[b]));
            weights.push(g.weight(order[a], order[b]));
        }
    }
    (signs, weights)
}

/// Maps a membership vector over branching positions back to original
/// vertex ids and canonicalizes.
fn to_original(memb: &[u8], order: &[usize]) -> Partition {
    let mut orig = vec![0u32; memb.len()];
    for (pos, &m) in memb.iter().enumerate() {
        orig[order[pos]] = m as u32;
    }
    Partition::canonicalize(&orig).unwrap()
}

/// Frontier node of the best-first phase, inline to stay allocation-free.
/// The heap pops the smallest bound first, then the deepest node, then the
/// lexicographically smallest prefix.
#[derive(Clone, Copy)]
struct Node {
    bound: f64,
    len: u8,
    memb: [u8; MAX_SOLVER_N],
}

impl Node {
    fn new(bound: f64, prefix: &[u8]) -> Self {
        let mut memb = [0u8; MAX_SOLVER_N];
        memb[..prefix.len()].copy_from_slice(prefix);
        Node {
            bound,
            len: prefix.len() as u8,
            memb,
        }
    }

    fn prefix(&self) -> &[u8] {
        &self.memb[..self.len as usize]
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| self.len.cmp(&other.len))
            .then_with(|| other.prefix().cmp(self.prefix()))
    }
}

/// Incremental search state over the permuted pair arrays.
///
/// For every vertex v, `pos_to[v*n + c]` and `neg_to[v*n + c]` hold the
/// positive and negative weight from v to the assigned vertices of module c,
/// and `pos_total[v]` the positive weight from v to all assigned vertices.
/// Attaching v to module c therefore costs
/// `neg_to[v][c] + pos_total[v] - pos_to[v][c]`, and opening a fresh module
/// costs `pos_total[v]`.
struct State<'g> {
    n: usize,
    signs: &'g [i8],
    weights: &'g [f64],
    memb: Vec<u8>,
    depth: usize,
    module_count: usize,
    fixed: f64,
    pos_to: Vec<f64>,
    neg_to: Vec<f64>,
    pos_total: Vec<f64>,
    trail: Vec<(f64, usize)>,
}

impl<'g> State<'g> {
    fn new(n: usize, signs: &'g [i8], weights: &'g [f64]) -> Self {
        State {
            n,
            signs,
            weights,
            memb: vec![0; n],
            depth: 0,
            module_count: 0,
            fixed: 0.0,
            pos_to: vec![0.0; n * n],
            neg_to: vec![0.0; n * n],
            pos_total: vec![0.0; n],
            trail: Vec::with_capacity(n),
        }
    }

    #[inline]
    fn attach_cost(&self, u: usize, c: usize) -> f64 {
        self.neg_to[u * self.n + c] + self.pos_total[u] - self.pos_to[u * self.n + c]
    }

    /// Assigns the next vertex to module c, which must be at most the
    /// current module count (equality opens a fresh module).
    fn assign(&mut self, c: usize) {
        debug_assert!(c <= self.module_count);
        let u = self.depth;
        self.trail.push((self.fixed, self.module_count));
        self.fixed += if c == self.module_count {
            self.pos_total[u]
        } else {
            self.attach_cost(u, c)
        };
        self.memb[u] = c as u8;
        if c == self.module_count {
            self.module_count += 1;
        }
        if u + 1 < self.n {
            let off = pair_rank(self.n, u, u + 1);
            for v in u + 1..self.n {
                let r = off + (v - u - 1);
                let w = self.weights[r];
                if self.signs[r] > 0 {
                    self.pos_to[v * self.n + c] += w;
                    self.pos_total[v] += w;
                } else {
                    self.neg_to[v * self.n + c] += w;
                }
            }
        }
        self.depth += 1;
    }

    fn unassign(&mut self) {
        self.depth -= 1;
        let u = self.depth;
        let c = self.memb[u] as usize;
        if u + 1 < self.n {
            let off = pair_rank(self.n, u, u + 1);
            for v in u + 1..self.n {
                let r = off + (v - u - 1);
                let w = self.weights[r];
                if self.signs[r] > 0 {
                    self.pos_to[v * self.n + c] -= w;
                    self.pos_total[v] -= w;
                } else {
                    self.neg_to[v * self.n + c] -= w;
                }
            }
        }
        let (fixed, mc) = self.trail.pop().expect("unassign below the root");
        self.fixed = fixed;
        self.module_count = mc;
    }

    /// Rewinds to the longest common prefix with `target`, then replays the
    /// rest. Cheap when consecutive targets share long prefixes.
    fn morph_to(&mut self, target: &[u8]) {
        let mut lcp = 0;
        while lcp < self.depth && lcp < target.len() && self.memb[lcp] == target[lcp] {
            lcp += 1;
        }
        while self.depth > lcp {
            self.unassign();
        }
        for &label in &target[self.depth..] {
            self.assign(label as usize);
        }
    }

    /// Admissible lower bound on the best completion from this node.
    fn bound(&self) -> f64 {
        let mut b = self.fixed;
        let mut u = self.depth;
        while u < self.n {
            if u + 1 < self.n {
                b += self.pair_lower(u, u + 1);
                u += 2;
            } else {
                b += self.single_lower(u);
                u += 1;
            }
        }
        b
    }

    fn single_lower(&self, u: usize) -> f64 {
        let mut best = self.pos_total[u];
        for c in 0..self.module_count {
            let a = self.attach_cost(u, c);
            if a < best {
                best = a;
            }
        }
        best
    }

    /// Cheapest joint placement of unassigned u and v (consecutive in the
    /// branching order) against the assigned prefix, counting their own
    /// edge. Minimizes over: both in one existing module, two different
    /// existing modules, one existing plus one fresh, both fresh.
    fn pair_lower(&self, u: usize, v: usize) -> f64 {
        let r = pair_rank(self.n, u, v);
        let w = self.weights[r];
        let (same_extra, diff_extra) = if self.signs[r] > 0 {
            (0.0, w)
        } else {
            (w, 0.0)
        };
        let pu = self.pos_total[u];
        let pv = self.pos_total[v];
        // Both fresh: either one shared fresh module or two separate ones,
        // and one of the two extras is always zero.
        let mut best = pu + pv;
        let mc = self.module_count;
        if mc > 0 {
            let mut bv1 = f64::INFINITY;
            let mut bv1_c = usize::MAX;
            let mut bv2 = f64::INFINITY;
            for c in 0..mc {
                let a = self.attach_cost(v, c);
                if a < bv1 {
                    bv2 = bv1;
                    bv1 = a;
                    bv1_c = c;
                } else if a < bv2 {
                    bv2 = a;
                }
            }
            let mut bu1 = f64::INFINITY;
            for c in 0..mc {
                let au = self.attach_cost(u, c);
                if au < bu1 {
                    bu1 = au;
                }
                let same = au + self.attach_cost(v, c) + same_extra;
                if same < best {
                    best = same;
                }
                let other = if c == bv1_c { bv2 } else { bv1 };
                if other.is_finite() {
                    let diff = au + other + diff_extra;
                    if diff < best {
                        best = diff;
                    }
                }
            }
            let u_in_v_fresh = bu1 + pv + diff_extra;
            if u_in_v_fresh < best {
                best = u_in_v_fresh;
            }
            let v_in_u_fresh = pu + bv1 + diff_extra;
            if v_in_u_fresh < best {
                best = v_in_u_fresh;
            }
        }
        best
    }
}

/// Greedy attachment followed by single-vertex relocation descent; the
/// result is only an incumbent for pruning, never the reported optimum.
fn greedy_descend(state: &mut State) -> (f64, Vec<u8>) {
    let n = state.n;
    for _ in 0..n {
        let u = state.depth;
        let mc = state.module_count;
        let mut best_c = mc;
        let mut best = state.pos_total[u];
        for c in 0..mc {
            let a = state.attach_cost(u, c);
            if a < best {
                best = a;
                best_c = c;
            }
        }
        state.assign(best_c);
    }
    let memb = state.memb[..n].to_vec();
    while state.depth > 0 {
        state.unassign();
    }
    descend(n, state.signs, state.weights, memb)
}

/// Moves single vertices to strictly cheaper modules until no move helps.
/// Returns the exact recomputed value.
fn descend(n: usize, signs: &[i8], weights: &[f64], mut memb: Vec<u8>) -> (f64, Vec<u8>) {
    let mut module_count = memb.iter().map(|&m| m as usize + 1).max().unwrap_or(0);
    for _pass in 0..4 * n {
        let mut improved = false;
        for u in 0..n {
            let mut neg_to = vec![0.0; module_count + 1];
            let mut pos_to = vec![0.0; module_count + 1];
            let mut pos_tot = 0.0;
            for v in 0..n {
                if v == u {
                    continue;
                }
                let r = rank_uv(n, u, v);
                let w = weights[r];
                if signs[r] > 0 {
                    pos_to[memb[v] as usize] += w;
                    pos_tot += w;
                } else {
                    neg_to[memb[v] as usize] += w;
                }
            }
            let cur = memb[u] as usize;
            let cur_cost = neg_to[cur] + pos_tot - pos_to[cur];
            let mut best_c = cur;
            let mut best = cur_cost;
            for c in 0..module_count {
                if c == cur {
                    continue;
                }
                let a = neg_to[c] + pos_tot - pos_to[c];
                if a < best {
                    best = a;
                    best_c = c;
                }
            }
            if pos_tot < best {
                best = pos_tot;
                best_c = module_count;
            }
            if best_c != cur && best < cur_cost {
                memb[u] = best_c as u8;
                if best_c == module_count {
                    module_count += 1;
                }
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    // Exact value and compact labels; incremental deltas above only guide.
    let mut value = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let r = rank_uv(n, i, j);
            let together = memb[i] == memb[j];
            if (signs[r] < 0 && together) || (signs[r] > 0 && !together) {
                value += weights[r];
            }
        }
    }
    let mut map = vec![u8::MAX; module_count + 1];
    let mut next = 0u8;
    for m in memb.iter_mut() {
        let slot = &mut map[*m as usize];
        if *slot == u8::MAX {
            *slot = next;
            next += 1;
        }
        *m = *slot;
    }
    (value, memb)
}

#[inline]
fn rank_uv(n: usize, u: usize, v: usize) -> usize {
    pair_rank(n, u.min(v), u.max(v))
}

struct Task {
    nodes: u64,
    sols: Vec<Partition>,
    capped: bool,
    below: Option<f64>,
}

/// Expands the root level by level until at least `target` prefixes exist
/// (or the split depth cap is hit), pruning against the optimum on the way.
/// Children are generated in label order, so the result lists disjoint
/// lexicographic blocks covering the whole surviving tree, in order.
fn build_frontier(state: &mut State, optimum: f64, target: usize, nodes: &mut u64) -> Vec<Vec<u8>> {
    let n = state.n;
    *nodes += 1;
    state.assign(0);
    let keep = state.bound() <= optimum;
    state.unassign();
    if !keep {
        return Vec::new();
    }
    let mut level = vec![vec![0u8]];
    let mut depth = 1;
    while level.len() < target && depth < n && depth <= MAX_SPLIT_DEPTH {
        let mut next = Vec::new();
        for prefix in &level {
            state.morph_to(prefix);
            let mc = state.module_count;
            for c in 0..=mc {
                state.assign(c);
                *nodes += 1;
                if state.bound() <= optimum {
                    let mut p = prefix.clone();
                    p.push(c as u8);
                    next.push(p);
                }
                state.unassign();
            }
        }
        level = next;
        depth += 1;
        if level.is_empty() {
            break;
        }
    }
    level
}

/// Walks the subtree under the current state, collecting optimum-valued
/// leaves into `task.sols` up to the cap. Returns false to cut the walk
/// (cap, deadline, or a value below the target).
fn dfs(
    state: &mut State,
    optimum: f64,
    limit: usize,
    order: &[usize],
    deadline: Option<Instant>,
    timed_out: &AtomicBool,
    task: &mut Task,
) -> bool {
    if state.depth == state.n {
        let v = state.fixed;
        if v == optimum {
            if task.sols.len() == limit {
                task.capped = true;
                return false;
            }
            task.sols.push(to_original(&state.memb, order));
        } else if v < optimum {
            task.below = Some(task.below.map_or(v, |b| b.min(v)));
            return false;
        }
        return true;
    }
    let mc = state.module_count;
    for c in 0..=mc {
        state.assign(c);
        task.nodes += 1;
        if task.nodes & 0x1fff == 0 {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    timed_out.store(true, AtomicOrdering::Relaxed);
                }
            }
            if timed_out.load(AtomicOrdering::Relaxed) {
                state.unassign();
                return false;
            }
        }
        let keep = if state.bound() <= optimum {
            dfs(state, optimum, limit, order, deadline, timed_out, task)
        } else {
            true
        };
        state.unassign();
        if !keep {
            return false;
        }
    }
    true
}
