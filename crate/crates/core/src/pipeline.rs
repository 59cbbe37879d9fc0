//! End-to-end runs: solve an instance, analyze its solution space, persist
//! every artifact, and aggregate whole experiment grids.
//!
//! Determinism contract: given the same instance and configuration, every
//! persisted artifact is byte-identical across runs and thread counts. Two
//! rules make that hold. First, anything machine- or schedule-dependent
//! (wall times, node counts) lives in one `timings` object that consumers
//! ignore when comparing runs; thread counts never appear in artifacts at
//! all. Second, downstream analysis always reruns from the persisted form:
//! the distance matrix used for classification is parsed back from the CSV
//! it was written to, so reports stay exactly reproducible from artifacts
//! alone.

use crate::clustering::{select_k, ClusteringConfig, ClusteringResult, Verdict};
use crate::coreparts::core_part;
use crate::error::{CcError, Result};
use crate::generator::{generate, max_qm, GeneratorConfig};
use crate::graph::SignedGraph;
use crate::io;
use crate::metrics::DissimilarityMatrix;
use crate::partition::Partition;
use crate::solver::{enumerate_optima, solve_optimum, SolverConfig};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

/// Runs `f` inside a dedicated pool of `threads` workers, so its internal
/// parallelism never spills onto the global pool.
pub fn with_thread_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Err(CcError::Parameter("thread count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CcError::Parameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Stable per-instance seed: FNV-1a over the experiment coordinates, so
/// adding cells or replications never shifts the seeds of existing ones.
pub fn instance_seed(base_seed: u64, n: usize, l0: usize, qm: f64, rep: usize) -> u64 {
    let key = format!("{base_seed}|{n}|{l0}|{qm:.6}|{rep}");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    /// Silhouette acceptance threshold for a multi-class split.
    pub threshold: f64,
    /// Upper bound of the class-count sweep.
    pub kmax: usize,
    pub out_dir: PathBuf,
    /// Artifact file stem for this instance.
    pub label: String,
}

impl PipelineConfig {
    pub fn new(out_dir: impl Into<PathBuf>, label: impl Into<String>) -> Self {
        PipelineConfig {
            solver: SolverConfig::default(),
            threshold: 0.51,
            kmax: 50,
            out_dir: out_dir.into(),
            label: label.into(),
        }
    }
}

/// Echo of how an instance was generated, for provenance in reports.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeneratorEcho {
    pub n: usize,
    pub l0: usize,
    pub qm: f64,
    pub seed: u64,
    pub misplaced: usize,
}

/// Classification artifact: the clustering outcome plus the knobs that
/// produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub solution_count: usize,
    pub verdict: String,
    pub class_count: usize,
    pub medoids: Vec<usize>,
    pub assignment: Vec<usize>,
    pub silhouette: f64,
    pub silhouette_by_k: Vec<(usize, f64)>,
    pub diameter: f64,
    pub threshold: f64,
    pub kmax: usize,
    pub tightness_cutoff: Option<f64>,
}

impl ClassifyReport {
    pub fn new(r: &ClusteringResult, config: &ClusteringConfig, p: usize) -> Self {
        ClassifyReport {
            solution_count: p,
            verdict: r.verdict.to_string(),
            class_count: r.k,
            medoids: r.medoids.clone(),
            assignment: r.assignment.clone(),
            silhouette: r.silhouette,
            silhouette_by_k: r.silhouette_by_k.clone(),
            diameter: r.diameter,
            threshold: config.threshold,
            kmax: config.kmax,
            tightness_cutoff: config.tightness_cutoff,
        }
    }
}

/// One stable core: the vertices, their always-together blocks, and the
/// covered fraction of the graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoreEntry {
    pub solution_count: usize,
    pub vertices: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    pub fraction: f64,
    pub tie_broken: bool,
}

/// Core artifact: one entry per solution class plus one over the whole
/// space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoreReport {
    pub solution_count: usize,
    pub classes: Vec<CoreEntry>,
    pub overall: CoreEntry,
}

/// Builds the core report for a clustered solution list. `assignment` maps
/// each solution to a class below `class_count`; every class must be
/// non-empty.
pub fn class_core_report(
    solutions: &[Partition],
    assignment: &[usize],
    class_count: usize,
) -> Result<CoreReport> {
    if assignment.len() != solutions.len() {
        return Err(CcError::Dimension(format!(
            "assignment covers {} solutions, list has {}",
            assignment.len(),
            solutions.len()
        )));
    }
    if solutions.is_empty() {
        return Err(CcError::Parameter("no solutions to summarize".into()));
    }
    let n = solutions[0].len();
    let entry = |subset: Vec<Partition>| -> Result<CoreEntry> {
        let count = subset.len();
        let core = core_part(&subset)?;
        Ok(CoreEntry {
            solution_count: count,
            fraction: core.fraction(n),
            vertices: core.vertices,
            blocks: core.blocks,
            tie_broken: core.tie_broken,
        })
    };
    let mut classes = Vec::with_capacity(class_count);
    for c in 0..class_count {
        let subset: Vec<Partition> = solutions
            .iter()
            .zip(assignment)
            .filter(|(_, &a)| a == c)
            .map(|(s, _)| s.clone())
            .collect();
        if subset.is_empty() {
            return Err(CcError::Parameter(format!("class {c} is empty")));
        }
        classes.push(entry(subset)?);
    }
    let overall = entry(solutions.to_vec())?;
    Ok(CoreReport {
        solution_count: solutions.len(),
        classes,
        overall,
    })
}

/// Machine-dependent effort measurements. Excluded from any comparison of
/// runs; everything outside this object is deterministic.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timings {
    pub solve_ms: u64,
    pub enumerate_ms: u64,
    pub analyze_ms: u64,
    pub total_ms: u64,
    pub search_nodes: u64,
}

/// Names of the files an instance run produced, relative to the output
/// directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactNames {
    pub graph: String,
    pub solutions: String,
    pub distances: String,
    pub classify: String,
    pub coreparts: String,
}

/// Everything one instance run established.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceReport {
    pub label: String,
    pub n: usize,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorEcho>,
    pub optimum: f64,
    /// Optimum over total pair weight (over m for unit weights).
    pub imbalance_ratio: f64,
    /// Retained optimal solutions; a lower bound on the true number when
    /// `complete` is false.
    pub solution_count: usize,
    pub solution_count_kind: String,
    pub complete: bool,
    /// Module count of a solution -> how many retained solutions have it.
    pub module_counts: BTreeMap<usize, usize>,
    pub verdict: String,
    /// 1 unique solution, 2 single class, 3 multiple classes,
    /// 4 inconclusive.
    pub space_type: u8,
    pub class_count: usize,
    pub class_sizes: Vec<usize>,
    pub silhouette: f64,
    pub diameter: f64,
    pub class_core_fractions: Vec<f64>,
    pub mean_class_core_fraction: f64,
    pub overall_core_fraction: f64,
    pub artifacts: ArtifactNames,
    pub timings: Timings,
}

/// Numeric space type of a verdict, 1 through 4.
pub fn space_type(v: Verdict) -> u8 {
    match v {
        Verdict::UniqueSolution => 1,
        Verdict::SingleClass => 2,
        Verdict::MultiClass => 3,
        Verdict::Inconclusive => 4,
    }
}

/// Space-type counts (types 1 through 4) over a batch of reports.
pub fn summarize_space(reports: &[InstanceReport]) -> [usize; 4] {
    let mut counts = [0usize; 4];
    for r in reports {
        counts[(r.space_type - 1) as usize] += 1;
    }
    counts
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ CcError::Stage { .. } => e,
        e => CcError::stage(name, e),
    })
}

/// Solves one instance and runs the full analysis, persisting the graph,
/// the solution list, the distance matrix, the classification, the core
/// report and the instance report under `cfg.out_dir`.
///
/// Cross-checks along the way re-derive key numbers from the persisted
/// artifacts (solution count, optimum imbalance) and fail with a
/// cross-check error rather than let a report disagree with its files.
pub fn run_instance(
    g: &SignedGraph,
    origin: Option<GeneratorEcho>,
    cfg: &PipelineConfig,
) -> Result<InstanceReport> {
    let total_start = Instant::now();
    let label = &cfg.label;
    let names = ArtifactNames {
        graph: format!("{label}.graph"),
        solutions: format!("{label}.solutions"),
        distances: format!("{label}.distances.csv"),
        classify: format!("{label}.classify.json"),
        coreparts: format!("{label}.coreparts.json"),
    };
    let path = |name: &str| cfg.out_dir.join(name);

    stage("write-graph", io::write_graph(&path(&names.graph), g))?;

    let solve_start = Instant::now();
    let (optimum, _witness) = stage("solve", solve_optimum(g, &cfg.solver))?;
    let solve_ms = solve_start.elapsed().as_millis() as u64;

    let enum_start = Instant::now();
    let space = stage("enumerate", enumerate_optima(g, optimum, &cfg.solver))?;
    let enumerate_ms = enum_start.elapsed().as_millis() as u64;
    stage(
        "write-solutions",
        io::write_solutions(&path(&names.solutions), &space),
    )?;

    // Re-read what was just persisted and re-derive the headline numbers.
    let reread = stage(
        "check-solutions",
        io::read_solutions(&path(&names.solutions)),
    )?;
    if reread.solutions.len() != space.solutions.len()
        || reread.optimum != space.optimum
        || reread.complete != space.complete
    {
        return Err(CcError::CrossCheck(format!(
            "solutions file disagrees with the search: file has {} solutions at {}, \
             search produced {} at {}",
            reread.solutions.len(),
            reread.optimum,
            space.solutions.len(),
            space.optimum
        )));
    }
    if space.solutions.is_empty() {
        return Err(CcError::stage(
            "enumerate",
            CcError::CrossCheck("enumeration produced no solutions".into()),
        ));
    }
    let recomputed = g.imbalance(&reread.solutions[0])?;
    if recomputed != optimum {
        return Err(CcError::CrossCheck(format!(
            "first persisted solution has imbalance {recomputed}, report says {optimum}"
        )));
    }

    let analyze_start = Instant::now();
    let matrix = stage(
        "distances",
        DissimilarityMatrix::from_partitions(&space.solutions),
    )?;
    stage(
        "write-distances",
        io::write_distances(&path(&names.distances), &matrix),
    )?;
    // Classification must be reproducible from the CSV artifact alone, so
    // it runs on the re-parsed, precision-limited matrix.
    let matrix = stage(
        "check-distances",
        io::read_distances(&path(&names.distances)),
    )?;
    if matrix.size() != space.solutions.len() {
        return Err(CcError::CrossCheck(format!(
            "distance file holds {} rows for {} solutions",
            matrix.size(),
            space.solutions.len()
        )));
    }

    let clustering_config = ClusteringConfig {
        threshold: cfg.threshold,
        kmax: cfg.kmax,
        // A solution space counts as one tight class only when its diameter
        // stays below a third of the distance cap ln(n); wider sub-threshold
        // spaces are reported INCONCLUSIVE rather than guessed at.
        tightness_cutoff: Some((g.n() as f64).ln() / 3.0),
    };
    let classified = stage("classify", select_k(&matrix, &clustering_config))?;
    stage(
        "write-classify",
        io::write_json(
            &path(&names.classify),
            &ClassifyReport::new(&classified, &clustering_config, space.solutions.len()),
        ),
    )?;

    let cores = stage(
        "coreparts",
        class_core_report(&space.solutions, &classified.assignment, classified.k),
    )?;
    stage(
        "write-coreparts",
        io::write_json(&path(&names.coreparts), &cores),
    )?;
    let analyze_ms = analyze_start.elapsed().as_millis() as u64;

    let mut module_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &space.solutions {
        *module_counts.entry(s.module_count()).or_insert(0) += 1;
    }
    let class_core_fractions: Vec<f64> = cores.classes.iter().map(|c| c.fraction).collect();
    let mean_class_core_fraction =
        class_core_fractions.iter().sum::<f64>() / class_core_fractions.len() as f64;

    let report = InstanceReport {
        label: label.clone(),
        n: g.n(),
        m: g.pair_count(),
        generator: origin,
        optimum,
        imbalance_ratio: optimum / g.total_weight(),
        solution_count: space.solutions.len(),
        solution_count_kind: if space.complete {
            "EXACT"
        } else {
            "LOWER_BOUND"
        }
        .into(),
        complete: space.complete,
        module_counts,
        verdict: classified.verdict.to_string(),
        space_type: space_type(classified.verdict),
        class_count: classified.k,
        class_sizes: classified.class_sizes(),
        silhouette: classified.silhouette,
        diameter: classified.diameter,
        class_core_fractions,
        mean_class_core_fraction,
        overall_core_fraction: cores.overall.fraction,
        artifacts: names,
        timings: Timings {
            solve_ms,
            enumerate_ms,
            analyze_ms,
            total_ms: total_start.elapsed().as_millis() as u64,
            search_nodes: space.stats.nodes,
        },
    };
    stage(
        "write-report",
        io::write_json(&path(&format!("{label}.report.json")), &report),
    )?;
    Ok(report)
}

/// A full experiment: the cartesian grid of shapes and noise levels, with
/// `replications` seeded instances per defined cell.
#[derive(Debug, Clone)]
pub struct ExperimentGrid {
    pub n_values: Vec<usize>,
    pub l0_values: Vec<usize>,
    pub qm_values: Vec<f64>,
    pub replications: usize,
    pub base_seed: u64,
    pub solver: SolverConfig,
    pub threshold: f64,
    pub kmax: usize,
    /// Instances processed in parallel; solver threads stay at 1 inside a
    /// grid so runs scale over instances, not within them.
    pub threads: usize,
    pub out_dir: PathBuf,
}

/// The default desk-scale experiment.
pub fn desk_grid(out_dir: impl Into<PathBuf>) -> ExperimentGrid {
    ExperimentGrid {
        n_values: vec![8, 12, 16],
        l0_values: vec![2, 3],
        qm_values: vec![0.05, 0.15, 0.25, 0.45, 0.65, 0.85],
        replications: 30,
        base_seed: 1,
        solver: SolverConfig {
            enumeration_limit: 1000,
            time_limit: None,
            threads: 1,
        },
        threshold: 0.51,
        kmax: 50,
        threads: 1,
        out_dir: out_dir.into(),
    }
}

/// Aggregates of one grid cell. Counts refer to retained solutions, so
/// cells with truncated instances report lower bounds there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub l0: usize,
    pub qm: f64,
    /// "ok", or "undefined" when qm exceeds the cap for this shape.
    pub status: String,
    /// Instances that completed and fed the means below.
    pub replications: usize,
    pub truncated: usize,
    pub failed: usize,
    pub mean_solutions: f64,
    pub max_solutions: usize,
    pub mean_imbalance: f64,
    pub mean_imbalance_ratio: f64,
    pub mean_module_count: f64,
    pub unique: usize,
    pub single_class: usize,
    pub multi_class: usize,
    pub inconclusive: usize,
    /// SINGLE_CLASS share among instances with several solutions; absent
    /// when no instance had several.
    pub single_class_proportion: Option<f64>,
    pub mean_class_core_fraction: f64,
    pub mean_overall_core_fraction: f64,
}

/// One imbalance-ratio bin (left-closed, width 0.05) over all grid
/// instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinSummary {
    pub lower: f64,
    pub upper: f64,
    pub instances: usize,
    pub unique: usize,
    pub single_class: usize,
    pub multi_class: usize,
    pub inconclusive: usize,
    /// Share of types 1 and 2 (one solution, or one class of solutions).
    pub settled_share: f64,
    pub mean_solutions: f64,
}

/// One instance that did not produce a report, with the stage-tagged
/// reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureNote {
    pub label: String,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSummary {
    pub cells: Vec<CellSummary>,
    pub bins: Vec<BinSummary>,
    pub failures: Vec<FailureNote>,
}

impl GridSummary {
    /// Fixed-column CSV of the cells, one row per cell in grid order.
    pub fn cells_csv(&self) -> String {
        let mut out = String::from(
            "n,l0,qm,status,replications,truncated,failed,mean_solutions,max_solutions,\
             mean_imbalance,mean_imbalance_ratio,mean_module_count,unique,single_class,\
             multi_class,inconclusive,single_class_proportion,mean_class_core_fraction,\
             mean_overall_core_fraction\n",
        );
        for c in &self.cells {
            let scp = c
                .single_class_proportion
                .map_or("NA".to_string(), |v| format!("{v:.6}"));
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:.6},{},{:.6},{:.6},{:.6},{},{},{},{},{},{:.6},{:.6}\n",
                c.n,
                c.l0,
                c.qm,
                c.status,
                c.replications,
                c.truncated,
                c.failed,
                c.mean_solutions,
                c.max_solutions,
                c.mean_imbalance,
                c.mean_imbalance_ratio,
                c.mean_module_count,
                c.unique,
                c.single_class,
                c.multi_class,
                c.inconclusive,
                scp,
                c.mean_class_core_fraction,
                c.mean_overall_core_fraction,
            ));
        }
        out
    }

    pub fn bins_csv(&self) -> String {
        let mut out = String::from(
            "lower,upper,instances,unique,single_class,multi_class,inconclusive,\
             settled_share,mean_solutions\n",
        );
        for b in &self.bins {
            out.push_str(&format!(
                "{:.2},{:.2},{},{},{},{},{},{:.6},{:.6}\n",
                b.lower,
                b.upper,
                b.instances,
                b.unique,
                b.single_class,
                b.multi_class,
                b.inconclusive,
                b.settled_share,
                b.mean_solutions,
            ));
        }
        out
    }
}

fn instance_label(n: usize, l0: usize, qm: f64, rep: usize) -> String {
    format!("n{n}-l{l0}-q{qm}-r{rep:02}")
}

/// Runs (or resumes) every instance of the grid and writes `summary.csv`,
/// `bins.csv` and `grid.json` next to the per-instance artifacts.
///
/// An instance whose report file already exists is reused instead of
/// recomputed, so an interrupted grid continues where it stopped. Reports
/// are deterministic, which keeps resumed and fresh runs byte-identical
/// outside the timing fields. An instance that errors is recorded under
/// `failures` and leaves its cell's aggregates to the instances that
/// completed; only setup errors (bad grid, unwritable output) abort the
/// whole run.
pub fn run_grid(grid: &ExperimentGrid) -> Result<GridSummary> {
    if grid.replications == 0 {
        return Err(CcError::Parameter("replications must be positive".into()));
    }
    if grid.threads == 0 {
        return Err(CcError::Parameter("thread count must be positive".into()));
    }
    let instances_dir = grid.out_dir.join("instances");

    struct Cell {
        n: usize,
        l0: usize,
        qm: f64,
        defined: bool,
    }
    let mut cells = Vec::new();
    for &n in &grid.n_values {
        for &l0 in &grid.l0_values {
            for &qm in &grid.qm_values {
                let cap = max_qm(n, l0)?;
                cells.push(Cell {
                    n,
                    l0,
                    qm,
                    defined: qm <= cap + 1e-9,
                });
            }
        }
    }

    let work: Vec<(usize, usize)> = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.defined)
        .flat_map(|(ci, _)| (0..grid.replications).map(move |rep| (ci, rep)))
        .collect();

    let run_one = |&(ci, rep): &(usize, usize)| -> (usize, String, Result<InstanceReport>) {
        let cell = &cells[ci];
        let label = instance_label(cell.n, cell.l0, cell.qm, rep);
        let report_path = instances_dir.join(format!("{label}.report.json"));
        if report_path.exists() {
            if let Ok(report) = io::read_json::<InstanceReport>(&report_path) {
                return (ci, label, Ok(report));
            }
        }
        let seed = instance_seed(grid.base_seed, cell.n, cell.l0, cell.qm, rep);
        let config = GeneratorConfig {
            n: cell.n,
            l0: cell.l0,
            qm: cell.qm,
            seed,
        };
        let outcome = generate(&config).and_then(|inst| {
            let echo = GeneratorEcho {
                n: cell.n,
                l0: cell.l0,
                qm: cell.qm,
                seed,
                misplaced: inst.misplaced,
            };
            let cfg = PipelineConfig {
                solver: SolverConfig {
                    threads: 1,
                    ..grid.solver.clone()
                },
                threshold: grid.threshold,
                kmax: grid.kmax,
                out_dir: instances_dir.clone(),
                label: label.clone(),
            };
            run_instance(&inst.graph, Some(echo), &cfg)
        });
        (ci, label, outcome)
    };

    // A failed instance is recorded and the grid carries on; having no
    // report file on disk, it is retried on the next resume.
    let results: Vec<(usize, String, Result<InstanceReport>)> = if grid.threads == 1 {
        work.iter().map(run_one).collect()
    } else {
        with_thread_pool(grid.threads, || {
            use rayon::prelude::*;
            work.par_iter().map(run_one).collect()
        })?
    };

    let mut by_cell: Vec<Vec<&InstanceReport>> = vec![Vec::new(); cells.len()];
    let mut failed_by_cell = vec![0usize; cells.len()];
    let mut failures = Vec::new();
    for (ci, label, outcome) in &results {
        match outcome {
            Ok(report) => by_cell[*ci].push(report),
            Err(e) => {
                failed_by_cell[*ci] += 1;
                failures.push(FailureNote {
                    label: label.clone(),
                    error: e.to_string(),
                });
            }
        }
    }

    let mut summaries = Vec::with_capacity(cells.len());
    for ((cell, reports), &failed) in cells.iter().zip(&by_cell).zip(&failed_by_cell) {
        let mut s = summarize_cell(cell.n, cell.l0, cell.qm, cell.defined, reports);
        s.failed = failed;
        summaries.push(s);
    }
    let bins = bin_reports(results.iter().filter_map(|(_, _, r)| r.as_ref().ok()));

    let summary = GridSummary {
        cells: summaries,
        bins,
        failures,
    };
    io::write_text(&grid.out_dir.join("summary.csv"), &summary.cells_csv())?;
    io::write_text(&grid.out_dir.join("bins.csv"), &summary.bins_csv())?;
    io::write_json(&grid.out_dir.join("grid.json"), &summary)?;
    Ok(summary)
}

fn summarize_cell(
    n: usize,
    l0: usize,
    qm: f64,
    defined: bool,
    reports: &[&InstanceReport],
) -> CellSummary {
    let mut cell = CellSummary {
        n,
        l0,
        qm,
        status: if defined { "ok" } else { "undefined" }.into(),
        replications: reports.len(),
        truncated: 0,
        failed: 0,
        mean_solutions: 0.0,
        max_solutions: 0,
        mean_imbalance: 0.0,
        mean_imbalance_ratio: 0.0,
        mean_module_count: 0.0,
        unique: 0,
        single_class: 0,
        multi_class: 0,
        inconclusive: 0,
        single_class_proportion: None,
        mean_class_core_fraction: 0.0,
        mean_overall_core_fraction: 0.0,
    };
    if reports.is_empty() {
        return cell;
    }
    let count = reports.len() as f64;
    let mut multi_solution = 0usize;
    for r in reports {
        cell.truncated += usize::from(!r.complete);
        cell.mean_solutions += r.solution_count as f64;
        cell.max_solutions = cell.max_solutions.max(r.solution_count);
        cell.mean_imbalance += r.optimum;
        cell.mean_imbalance_ratio += r.imbalance_ratio;
        let mean_modules: f64 = r
            .module_counts
            .iter()
            .map(|(modules, howmany)| (*modules * *howmany) as f64)
            .sum::<f64>()
            / r.solution_count as f64;
        cell.mean_module_count += mean_modules;
        match r.space_type {
            1 => cell.unique += 1,
            2 => cell.single_class += 1,
            3 => cell.multi_class += 1,
            _ => cell.inconclusive += 1,
        }
        multi_solution += usize::from(r.solution_count > 1);
        cell.mean_class_core_fraction += r.mean_class_core_fraction;
        cell.mean_overall_core_fraction += r.overall_core_fraction;
    }
    cell.mean_solutions /= count;
    cell.mean_imbalance /= count;
    cell.mean_imbalance_ratio /= count;
    cell.mean_module_count /= count;
    cell.mean_class_core_fraction /= count;
    cell.mean_overall_core_fraction /= count;
    if multi_solution > 0 {
        cell.single_class_proportion = Some(cell.single_class as f64 / multi_solution as f64);
    }
    cell
}

fn bin_reports<'a>(reports: impl Iterator<Item = &'a InstanceReport>) -> Vec<BinSummary> {
    const WIDTH: f64 = 0.05;
    let mut map: BTreeMap<u32, BinSummary> = BTreeMap::new();
    for r in reports {
        // Bins are left-closed, so a ratio sitting exactly on a boundary
        // belongs to the bin it opens.  Dividing by 0.05 lands such ratios
        // a few ulps short of the integer (0.15 / 0.05 < 3 in f64), hence
        // the guard before flooring.
        let idx = (r.imbalance_ratio / WIDTH + 1e-9).floor() as u32;
        let bin = map.entry(idx).or_insert_with(|| BinSummary {
            lower: idx as f64 * WIDTH,
            upper: (idx + 1) as f64 * WIDTH,
            instances: 0,
            unique: 0,
            single_class: 0,
            multi_class: 0,
            inconclusive: 0,
            settled_share: 0.0,
            mean_solutions: 0.0,
        });
        bin.instances += 1;
        match r.space_type {
            1 => bin.unique += 1,
            2 => bin.single_class += 1,
            3 => bin.multi_class += 1,
            _ => bin.inconclusive += 1,
        }
        bin.mean_solutions += r.solution_count as f64;
    }
    map.into_values()
        .map(|mut b| {
            b.settled_share = (b.unique + b.single_class) as f64 / b.instances as f64;
            b.mean_solutions /= b.instances as f64;
            b
        })
        .collect()
}
