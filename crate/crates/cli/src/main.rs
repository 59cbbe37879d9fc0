//! Command-line front end: generate instances, solve them exactly,
//! enumerate optima, and analyze the resulting solution spaces.

use ccspace_core::clustering::{select_k, ClusteringConfig};
use ccspace_core::generator::{generate, GeneratorConfig};
use ccspace_core::io;
use ccspace_core::metrics::DissimilarityMatrix;
use ccspace_core::pipeline::{
    class_core_report, instance_seed, run_grid, run_instance, with_thread_pool, ClassifyReport,
    ExperimentGrid, GeneratorEcho, PipelineConfig,
};
use ccspace_core::solver::{
    brute_force_optima, solve, solve_optimum, SearchStats, SolutionSpace, SolverConfig,
};
use ccspace_core::{CcError, Result};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(
    name = "ccspace",
    version,
    about = "Exact correlation clustering on complete signed graphs, \
             with solution-space enumeration and analysis"
)]
struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Output directory; falls back to $CCSPACE_OUT, then to the current
    /// directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a signed graph with planted modules and sign noise.
    Generate(GenerateArgs),
    /// Prove the minimum imbalance; optionally enumerate every optimum.
    Solve(SolveArgs),
    /// Pairwise distances between the solutions of a solutions file.
    Distances(DistancesArgs),
    /// Cluster a distance matrix and classify the solution space.
    Classify(ClassifyArgs),
    /// Stable cores of a solution list (optionally per class).
    Coreparts(CorepartsArgs),
    /// Full pipeline on one instance: solve, enumerate, analyze, report.
    Run(RunArgs),
    /// Full pipeline over a parameter grid, resumable.
    Grid(GridArgs),
    /// Brute-force enumeration of all optima by exhaustive scan (small n).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Vertex count.
    #[arg(long)]
    n: usize,
    /// Planted module count.
    #[arg(long)]
    l0: usize,
    /// Fraction of pairs whose sign is flipped, in [0, max_qm(n, l0)].
    #[arg(long)]
    qm: f64,
    /// Output graph file; defaults to a named file in the output directory.
    #[arg(long, conflicts_with = "reps")]
    out: Option<PathBuf>,
    /// Also write the planted partition to this file.
    #[arg(long, conflicts_with = "reps")]
    planted: Option<PathBuf>,
    /// Batch mode: write this many instances plus a manifest.csv into the
    /// output directory, with per-instance seeds derived from --seed.
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    /// Input graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Enumerate every optimal partition instead of a single witness.
    #[arg(long)]
    enumerate: bool,
    /// Keep at most this many solutions when enumerating.
    #[arg(long, default_value_t = 100_000)]
    limit: usize,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Output solutions file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DistancesArgs {
    /// Input solutions file.
    #[arg(long)]
    solutions: PathBuf,
    /// Output CSV file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Input distance CSV.
    #[arg(long)]
    distances: PathBuf,
    /// Minimum silhouette for accepting a multi-class split.
    #[arg(long, default_value_t = 0.51)]
    threshold: f64,
    /// Largest class count tried.
    #[arg(long, default_value_t = 50)]
    kmax: usize,
    /// Vertex count of the underlying instance; enables the tightness rule
    /// (diameter at most ln(n)/3) that separates SINGLE_CLASS from
    /// INCONCLUSIVE when no split reaches the threshold.
    #[arg(long)]
    n: Option<usize>,
    /// Output JSON file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorepartsArgs {
    /// Input solutions file.
    #[arg(long)]
    solutions: PathBuf,
    /// Classification JSON whose assignment splits the solutions into
    /// classes; without it all solutions form one class.
    #[arg(long)]
    assignment: Option<PathBuf>,
    /// Output JSON file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Input graph file; omit to generate one from --n/--l0/--qm.
    #[arg(long, conflicts_with_all = ["n", "l0", "qm"])]
    graph: Option<PathBuf>,
    #[arg(long, required_unless_present = "graph")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "graph")]
    l0: Option<usize>,
    #[arg(long, required_unless_present = "graph")]
    qm: Option<f64>,
    /// Artifact file stem; defaults to the graph name or the generator
    /// coordinates.
    #[arg(long)]
    label: Option<String>,
    /// Keep at most this many solutions.
    #[arg(long, default_value_t = 100_000)]
    limit: usize,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Minimum silhouette for accepting a multi-class split.
    #[arg(long, default_value_t = 0.51)]
    threshold: f64,
    /// Largest class count tried.
    #[arg(long, default_value_t = 50)]
    kmax: usize,
}

#[derive(Args)]
struct GridArgs {
    /// Vertex counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [8, 12, 16])]
    n_values: Vec<usize>,
    /// Planted module counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3])]
    l0_values: Vec<usize>,
    /// Sign-flip fractions, comma separated.
    #[arg(long, value_delimiter = ',',
          default_values_t = [0.05, 0.15, 0.25, 0.45, 0.65, 0.85])]
    qm_values: Vec<f64>,
    /// Instances per grid cell.
    #[arg(long, default_value_t = 30)]
    reps: usize,
    /// Keep at most this many solutions per instance.
    #[arg(long, default_value_t = 1000)]
    limit: usize,
    /// Wall-clock budget per instance, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Minimum silhouette for accepting a multi-class split.
    #[arg(long, default_value_t = 0.51)]
    threshold: f64,
    /// Largest class count tried.
    #[arg(long, default_value_t = 50)]
    kmax: usize,
}

#[derive(Args)]
struct OracleArgs {
    /// Input graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Output solutions file.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("CCSPACE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn duration(seconds: Option<f64>) -> Result<Option<Duration>> {
    match seconds {
        None => Ok(None),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(CcError::Parameter(format!(
            "time limit must be a non-negative number of seconds, got {s}"
        ))),
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    let out_dir = resolve_out_dir(cli.out_dir.clone());
    match &cli.command {
        Command::Generate(args) => generate_cmd(&cli, args, &out_dir),
        Command::Solve(args) => solve_cmd(&cli, args),
        Command::Distances(args) => distances_cmd(&cli, args),
        Command::Classify(args) => classify_cmd(&cli, args),
        Command::Coreparts(args) => coreparts_cmd(args),
        Command::Run(args) => run_cmd(&cli, args, &out_dir),
        Command::Grid(args) => grid_cmd(&cli, args, &out_dir),
        Command::Oracle(args) => oracle_cmd(args),
    }
}

fn generate_cmd(cli: &Cli, args: &GenerateArgs, out_dir: &Path) -> Result<u8> {
    if let Some(reps) = args.reps {
        if reps == 0 {
            return Err(CcError::Parameter("--reps must be positive".into()));
        }
        let mut manifest = String::from("n,l0,qm,seed,misplaced,path\n");
        for rep in 0..reps {
            let seed = instance_seed(cli.seed, args.n, args.l0, args.qm, rep);
            let inst = generate(&GeneratorConfig {
                n: args.n,
                l0: args.l0,
                qm: args.qm,
                seed,
            })?;
            let name = format!("n{}-l{}-q{}-r{rep:02}.graph", args.n, args.l0, args.qm);
            io::write_graph(&out_dir.join(&name), &inst.graph)?;
            manifest.push_str(&format!(
                "{},{},{},{seed},{},{name}\n",
                args.n, args.l0, args.qm, inst.misplaced
            ));
        }
        let manifest_path = out_dir.join("manifest.csv");
        io::write_text(&manifest_path, &manifest)?;
        println!("wrote {reps} instances and {}", manifest_path.display());
        return Ok(0);
    }

    let inst = generate(&GeneratorConfig {
        n: args.n,
        l0: args.l0,
        qm: args.qm,
        seed: cli.seed,
    })?;
    let out = args.out.clone().unwrap_or_else(|| {
        out_dir.join(format!(
            "n{}-l{}-q{}-s{}.graph",
            args.n, args.l0, args.qm, cli.seed
        ))
    });
    io::write_graph(&out, &inst.graph)?;
    println!("wrote {} (misplaced {})", out.display(), inst.misplaced);
    if let Some(planted) = &args.planted {
        io::write_partition(planted, &inst.planted)?;
        println!("wrote {}", planted.display());
    }
    Ok(0)
}

fn solve_cmd(cli: &Cli, args: &SolveArgs) -> Result<u8> {
    let g = io::read_graph(&args.graph)?;
    let config = SolverConfig {
        enumeration_limit: args.limit,
        time_limit: duration(args.time_limit)?,
        threads: cli.threads,
    };
    if args.enumerate {
        let space = solve(&g, &config)?;
        io::write_solutions(&args.out, &space)?;
        println!("optimum {}", space.optimum);
        println!(
            "solutions {} ({})",
            space.solutions.len(),
            if space.complete {
                "complete"
            } else {
                "truncated"
            }
        );
        println!("wrote {}", args.out.display());
        // Truncation is a resource limit: the file is valid but the listing
        // stopped early.
        Ok(if space.complete { 0 } else { 3 })
    } else {
        let (optimum, witness) = solve_optimum(&g, &config)?;
        // One witness, so the file never claims completeness.
        let space = SolutionSpace {
            optimum,
            solutions: vec![witness],
            complete: false,
            stats: SearchStats::default(),
        };
        io::write_solutions(&args.out, &space)?;
        println!("optimum {optimum}");
        println!("wrote {}", args.out.display());
        Ok(0)
    }
}

fn distances_cmd(cli: &Cli, args: &DistancesArgs) -> Result<u8> {
    let space = io::read_solutions(&args.solutions)?;
    let m = with_thread_pool(cli.threads, || {
        DissimilarityMatrix::from_partitions(&space.solutions)
    })??;
    io::write_distances(&args.out, &m)?;
    println!("wrote {} ({p} x {p})", args.out.display(), p = m.size());
    Ok(0)
}

fn classify_cmd(cli: &Cli, args: &ClassifyArgs) -> Result<u8> {
    let d = io::read_distances(&args.distances)?;
    let config = ClusteringConfig {
        threshold: args.threshold,
        kmax: args.kmax,
        tightness_cutoff: args.n.map(|n| (n as f64).ln() / 3.0),
    };
    let result = with_thread_pool(cli.threads, || select_k(&d, &config))??;
    let report = ClassifyReport::new(&result, &config, d.size());
    io::write_json(&args.out, &report)?;
    println!(
        "verdict {} (k = {}, silhouette {:.4})",
        report.verdict, report.class_count, report.silhouette
    );
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn coreparts_cmd(args: &CorepartsArgs) -> Result<u8> {
    let space = io::read_solutions(&args.solutions)?;
    let (assignment, class_count) = match &args.assignment {
        Some(path) => {
            let classify: ClassifyReport = io::read_json(path)?;
            (classify.assignment, classify.class_count)
        }
        None => (vec![0; space.solutions.len()], 1),
    };
    let report = class_core_report(&space.solutions, &assignment, class_count)?;
    io::write_json(&args.out, &report)?;
    let n = space.solutions[0].len();
    println!(
        "core {} of {} vertices ({:.4})",
        report.overall.vertices.len(),
        n,
        report.overall.fraction
    );
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn run_cmd(cli: &Cli, args: &RunArgs, out_dir: &Path) -> Result<u8> {
    let (g, origin, default_label) = match &args.graph {
        Some(path) => {
            let g = io::read_graph(path)?;
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("instance")
                .to_string();
            (g, None, stem)
        }
        None => {
            // Presence enforced by clap when --graph is absent.
            let (n, l0, qm) = (args.n.unwrap(), args.l0.unwrap(), args.qm.unwrap());
            let inst = generate(&GeneratorConfig {
                n,
                l0,
                qm,
                seed: cli.seed,
            })?;
            let echo = GeneratorEcho {
                n,
                l0,
                qm,
                seed: cli.seed,
                misplaced: inst.misplaced,
            };
            (
                inst.graph,
                Some(echo),
                format!("n{n}-l{l0}-q{qm}-s{}", cli.seed),
            )
        }
    };
    let cfg = PipelineConfig {
        solver: SolverConfig {
            enumeration_limit: args.limit,
            time_limit: duration(args.time_limit)?,
            threads: cli.threads,
        },
        threshold: args.threshold,
        kmax: args.kmax,
        out_dir: out_dir.to_path_buf(),
        label: args.label.clone().unwrap_or(default_label),
    };
    let report = with_thread_pool(cli.threads, || run_instance(&g, origin, &cfg))??;
    println!("optimum {}", report.optimum);
    println!(
        "solutions {} ({})",
        report.solution_count,
        if report.complete {
            "complete"
        } else {
            "truncated"
        }
    );
    println!("verdict {}", report.verdict);
    println!(
        "report {}",
        out_dir.join(format!("{}.report.json", cfg.label)).display()
    );
    Ok(if report.complete { 0 } else { 3 })
}

fn grid_cmd(cli: &Cli, args: &GridArgs, out_dir: &Path) -> Result<u8> {
    let grid = ExperimentGrid {
        n_values: args.n_values.clone(),
        l0_values: args.l0_values.clone(),
        qm_values: args.qm_values.clone(),
        replications: args.reps,
        base_seed: cli.seed,
        solver: SolverConfig {
            enumeration_limit: args.limit,
            time_limit: duration(args.time_limit)?,
            threads: 1,
        },
        threshold: args.threshold,
        kmax: args.kmax,
        threads: cli.threads,
        out_dir: out_dir.to_path_buf(),
    };
    let summary = run_grid(&grid)?;
    let ok: usize = summary.cells.iter().map(|c| c.replications).sum();
    for f in &summary.failures {
        eprintln!("failed {}: {}", f.label, f.error);
    }
    println!("cells {}", summary.cells.len());
    println!("instances {ok} ok, {} failed", summary.failures.len());
    println!("summary {}", out_dir.join("summary.csv").display());
    Ok(0)
}

fn oracle_cmd(args: &OracleArgs) -> Result<u8> {
    let g = io::read_graph(&args.graph)?;
    let space = brute_force_optima(&g)?;
    io::write_solutions(&args.out, &space)?;
    println!("optimum {}", space.optimum);
    println!("solutions {}", space.solutions.len());
    println!("wrote {}", args.out.display());
    Ok(0)
}
