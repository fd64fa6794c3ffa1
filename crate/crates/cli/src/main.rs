//! `hsg`: dataset generation, distance matrices, embeddings, the benchmark
//! grid and simplex renderings from the command line.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 bad data, 5 every job failed.
//! Each successful command prints one JSON summary line on stdout.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hilbert_simplex::bench::{self, ExperimentSpec, SuiteOptions};
use hilbert_simplex::embed::{self, EmbeddingConfig, Target};
use hilbert_simplex::geometry::SimplexPoint;
use hilbert_simplex::graphs::{self, DistanceMatrix, Graph, SimilarityMatrix, SquareMatrix};
use hilbert_simplex::io;
use hilbert_simplex::manifolds::ManifoldKind;
use hilbert_simplex::render::{self, FieldDistance, TriangleGrid, VoronoiDistance};
use hilbert_simplex::rng::rng_from_seed;
use hilbert_simplex::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_DATA: u8 = 4;
const EXIT_ALL_FAILED: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "hsg", version, about = "Hilbert simplex geometry and graph embedding benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random graph (edge list) or random-point distance matrix (CSV).
    Gen(GenArgs),
    /// Turn a graph into a hop-distance or random-walk similarity matrix.
    Dist(DistArgs),
    /// Embed a distance or similarity matrix.
    Embed(EmbedArgs),
    /// Run an experiment grid described by a spec file.
    Bench(BenchArgs),
    /// Draw distance fields or Voronoi diagrams on the 2-simplex.
    #[command(subcommand)]
    Render(RenderCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Er,
    Ba,
    Points,
}

#[derive(Debug, Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    n: usize,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    /// Edges per new node (ba).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Output file; without it only the summary is printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistMethod {
    /// Shortest-path hop counts.
    Apsp,
    /// Random-walk similarity.
    Rw,
}

#[derive(Debug, Args)]
struct DistArgs {
    method: DistMethod,
    /// Edge-list file.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    graph: Option<PathBuf>,
    /// 0/1 adjacency matrix CSV.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Walk length (rw).
    #[arg(long, default_value_t = 5)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MatrixType {
    Dist,
    Sim,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    /// Distance or similarity matrix CSV.
    #[arg(long)]
    target: PathBuf,
    /// euclidean, l1, hyperboloid, hilbert or funk.
    #[arg(long)]
    kind: ManifoldKind,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = embed::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Coordinates CSV, one row per point.
    #[arg(long)]
    out: PathBuf,
    /// Matrix type, when it cannot be told from the contents.
    #[arg(long = "as")]
    as_type: Option<MatrixType>,
    #[arg(long, default_value_t = embed::DEFAULT_MAX_EPOCHS)]
    max_epochs: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Directory for results.csv and summary.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum RenderCommand {
    /// Distance from a center, with iso-distance contours (PGM).
    Balls(BallsArgs),
    /// Nearest-site labels (PPM).
    Voronoi(VoronoiArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BallDistance {
    Hilbert,
    /// Funk distance from each pixel to the center.
    Funk,
    /// Funk distance from the center to each pixel.
    Rfunk,
    Aitchison,
}

#[derive(Debug, Args)]
struct BallsArgs {
    #[arg(long)]
    dist: BallDistance,
    /// Three comma-separated positive coordinates summing to 1.
    #[arg(long)]
    center: String,
    #[arg(long, default_value_t = 256)]
    res: usize,
    /// Number of contour levels.
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VoronoiKind {
    Hilbert,
    Aitchison,
    /// Variation norm of the difference of log-ratio coordinates.
    Varlog,
}

#[derive(Debug, Args)]
struct VoronoiArgs {
    #[arg(long)]
    dist: VoronoiKind,
    /// File with one site per line.
    #[arg(long, conflicts_with = "random_sites", required_unless_present = "random_sites")]
    sites: Option<PathBuf>,
    /// Draw this many uniform random sites.
    #[arg(long, requires = "seed")]
    random_sites: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 256)]
    res: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => EXIT_IO,
            Error::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
            Error::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<Value, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Dist(a) => cmd_dist(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Render(RenderCommand::Balls(a)) => cmd_balls(a),
        Command::Render(RenderCommand::Voronoi(a)) => cmd_voronoi(a),
    };
    match outcome {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    match a.kind {
        GenKind::Points => {
            let m = graphs::random_points_distance_matrix(a.n, a.seed)?;
            if let Some(out) = &a.out {
                io::write_matrix_csv(m.matrix(), out)?;
            }
            Ok(json!({
                "command": "gen",
                "dataset_id": format!("points-n{}", a.n),
                "seed": a.seed,
                "n": a.n,
                "out": a.out.as_deref().map(display),
            }))
        }
        GenKind::Er | GenKind::Ba => {
            let (g, id) = match a.kind {
                GenKind::Er => {
                    let p = a.p.ok_or_else(|| Failure::usage("gen er needs --p"))?;
                    (graphs::gen_erdos_renyi(a.n, p, a.seed)?, format!("er-n{}-p{p}", a.n))
                }
                _ => {
                    let m = a.m.ok_or_else(|| Failure::usage("gen ba needs --m"))?;
                    (graphs::gen_barabasi_albert(a.n, m, a.seed)?, format!("ba-n{}-m{m}", a.n))
                }
            };
            if let Some(out) = &a.out {
                io::write_edge_list(&g, out)?;
            }
            Ok(json!({
                "command": "gen",
                "dataset_id": id,
                "seed": a.seed,
                "n": g.n(),
                "edges": g.edge_count(),
                "connected": g.is_connected(),
                "out": a.out.as_deref().map(display),
            }))
        }
    }
}

fn graph_from_adjacency(m: &SquareMatrix) -> Result<Graph, Failure> {
    let mut g = Graph::new(m.n());
    for i in 0..m.n() {
        for j in 0..m.n() {
            let (v, t) = (m.get(i, j), m.get(j, i));
            if v != t || !(v == 0.0 || v == 1.0) {
                return Err(Failure {
                    code: EXIT_DATA,
                    message: format!("adjacency matrix must be symmetric 0/1, entry ({i},{j}) = {v}"),
                });
            }
            if v == 1.0 && i < j {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

fn cmd_dist(a: DistArgs) -> CmdResult {
    if matches!(a.method, DistMethod::Rw) && a.steps < 1 {
        return Err(Failure::usage("--steps must be at least 1"));
    }
    let g = match (&a.graph, &a.matrix) {
        (Some(path), _) => io::read_edge_list(path)?,
        (None, Some(path)) => graph_from_adjacency(&io::read_matrix_csv(path)?)?,
        (None, None) => return Err(Failure::usage("one of --graph or --matrix is required")),
    };
    let (matrix, kind) = match a.method {
        DistMethod::Apsp => (graphs::all_pairs_shortest_paths(&g)?.matrix().clone(), "distance"),
        DistMethod::Rw => (graphs::random_walk_similarity(&g, a.steps)?.matrix().clone(), "similarity"),
    };
    io::write_matrix_csv(&matrix, &a.out)?;
    Ok(json!({
        "command": "dist",
        "matrix": kind,
        "n": matrix.n(),
        "out": display(&a.out),
    }))
}

fn load_target(path: &Path, as_type: Option<MatrixType>) -> Result<Target, Failure> {
    let m = io::read_matrix_csv(path)?;
    match as_type {
        Some(MatrixType::Dist) => Ok(Target::Distance(DistanceMatrix::new(m)?)),
        Some(MatrixType::Sim) => Ok(Target::Similarity(SimilarityMatrix::new(m)?)),
        None => {
            let dist = DistanceMatrix::new(m.clone());
            let sim = SimilarityMatrix::new(m);
            match (dist, sim) {
                (Ok(_), Ok(_)) => Err(Failure::usage(format!(
                    "{} is both a valid distance and similarity matrix; pass --as dist or --as sim",
                    path.display()
                ))),
                (Ok(d), Err(_)) => Ok(Target::Distance(d)),
                (Err(_), Ok(s)) => Ok(Target::Similarity(s)),
                (Err(d), Err(s)) => Err(Failure {
                    code: EXIT_DATA,
                    message: format!(
                        "{} is neither a distance matrix ({d}) nor a similarity matrix ({s})",
                        path.display()
                    ),
                }),
            }
        }
    }
}

fn cmd_embed(a: EmbedArgs) -> CmdResult {
    let target = load_target(&a.target, a.as_type)?;
    let mut template = EmbeddingConfig::new(a.kind, a.d, target.n());
    template.max_epochs = a.max_epochs;
    let outcome = embed::hyperparameter_search(&template, &target, a.trials, a.seed).map_err(|e| {
        match e {
            Error::AllTrialsDiverged { .. } => Failure {
                code: EXIT_ALL_FAILED,
                message: e.to_string(),
            },
            e => e.into(),
        }
    })?;
    let file = fs::File::create(&a.out).map_err(|e| Error::Io {
        path: a.out.clone(),
        source: e,
    })?;
    io::write_matrix_rows(file, outcome.result.y.rows())?;
    let loss_name = match target {
        Target::Distance(_) => "stress",
        Target::Similarity(_) => "kl",
    };
    Ok(json!({
        "command": "embed",
        "loss": loss_name,
        "final_loss": outcome.result.final_loss,
        "epochs": outcome.result.epochs_run,
        "config": outcome.config,
        "trials": outcome.trials.len(),
        "out": display(&a.out),
    }))
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    if a.workers < 1 {
        return Err(Failure::usage("--workers must be at least 1"));
    }
    let spec = ExperimentSpec::from_file(&a.spec).map_err(|e| match e {
        Error::Io { .. } => Failure::from(e),
        e => Failure::usage(e.to_string()),
    })?;
    fs::create_dir_all(&a.out).map_err(|e| Error::Io {
        path: a.out.clone(),
        source: e,
    })?;
    let results = a.out.join("results.csv");
    let options = SuiteOptions {
        workers: a.workers,
        results_csv: Some(results.clone()),
        log: true,
    };
    let report = bench::run_suite(&spec, &options)?;
    for f in &report.failures {
        eprintln!(
            "failed: {} seed {} {} d={}: {}",
            f.job.dataset_id, f.job.seed, f.job.kind, f.job.d, f.error
        );
    }
    if report.records.is_empty() {
        return Err(Failure {
            code: EXIT_ALL_FAILED,
            message: format!("all {} jobs failed", report.failures.len()),
        });
    }
    let summary = a.out.join("summary.csv");
    bench::write_summary_csv(&bench::summarize(&report.records)?, &summary)?;
    Ok(json!({
        "command": "bench",
        "dataset_id": spec.dataset.id(),
        "records": report.records.len(),
        "resumed": report.resumed,
        "failed": report.failures.len(),
        "results": display(&results),
        "summary": display(&summary),
    }))
}

fn parse_point(text: &str) -> Result<SimplexPoint, Failure> {
    let coords = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::usage(format!("bad point {text:?}")))?;
    if coords.len() != 3 {
        return Err(Failure::usage(format!("expected 3 coordinates, got {}", coords.len())));
    }
    SimplexPoint::new(coords)
        .map_err(|e| Failure::usage(format!("{text:?} is not inside the simplex: {e}")))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| {
        Error::Io {
            path: path.to_path_buf(),
            source: e,
        }
        .into()
    })
}

fn cmd_balls(a: BallsArgs) -> CmdResult {
    let center = parse_point(&a.center)?;
    let distance = match a.dist {
        BallDistance::Hilbert => FieldDistance::Hilbert,
        BallDistance::Funk => FieldDistance::FunkForward,
        BallDistance::Rfunk => FieldDistance::FunkReverse,
        BallDistance::Aitchison => FieldDistance::Aitchison,
    };
    let field = render::render_distance_field(distance, &center, a.res)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let levels = field.contour_levels(a.levels);
    write_bytes(&a.out, &field.to_pgm(&levels))?;
    let sidecar = a.out.with_extension("levels.txt");
    let text: String = levels.iter().map(|l| format!("{l}\n")).collect();
    write_bytes(&sidecar, text.as_bytes())?;
    Ok(json!({
        "command": "render balls",
        "resolution": a.res,
        "levels": levels,
        "out": display(&a.out),
        "levels_file": display(&sidecar),
    }))
}

fn cmd_voronoi(a: VoronoiArgs) -> CmdResult {
    let sites = match (&a.sites, a.random_sites) {
        (Some(path), _) => io::read_simplex_points(path).map_err(|e| match e {
            Error::Io { .. } => Failure::from(e),
            e => Failure::usage(format!("invalid sites: {e}")),
        })?,
        (None, Some(count)) => {
            let seed = a.seed.ok_or_else(|| Failure::usage("--random-sites needs --seed"))?;
            let mut rng = rng_from_seed(seed);
            (0..count).map(|_| SimplexPoint::random(&mut rng, 3)).collect()
        }
        (None, None) => return Err(Failure::usage("one of --sites or --random-sites is required")),
    };
    let distance = match a.dist {
        VoronoiKind::Hilbert => VoronoiDistance::Hilbert,
        VoronoiKind::Aitchison => VoronoiDistance::Aitchison,
        VoronoiKind::Varlog => VoronoiDistance::VariationNormOnLogRep,
    };
    let labels = render::render_voronoi(&sites, distance, a.res)
        .map_err(|e| Failure::usage(e.to_string()))?;
    write_bytes(&a.out, &labels.to_ppm())?;
    let grid = TriangleGrid::new(a.res).map_err(Failure::from)?;
    let site_pixels: Vec<(usize, usize)> = sites.iter().map(|s| grid.pixel_of(s)).collect();
    Ok(json!({
        "command": "render voronoi",
        "resolution": a.res,
        "sites": sites.len(),
        "site_pixels": site_pixels,
        "out": display(&a.out),
    }))
}
