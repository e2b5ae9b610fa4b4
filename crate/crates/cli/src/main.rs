//! `msdecomp`: evaluate, compare, generate and produce microservice
//! decompositions from the command line.
//!
//! Exit codes: 0 on success, 1 on domain errors (parse, validation,
//! infeasible parameters), 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use msdecomp_core::{
    composite_scores, decompose_hierarchical, decompose_hillclimb, decompose_monolith, decompose_random,
    decompose_singletons, evaluate_all, generate_planted, load_decomposition, load_graph, load_metric_rows,
    render_report, render_table, save_decomposition, save_graph, CutCriterion, DecomposeError, EdgePolicy,
    HierarchicalParams, HillClimbParams, IcpSource, IngestError, Linkage, MetricError, MetricRow, MonolithGraph,
    PlantedSpec, RenderFormat, ScoringError, SmSource, StdConvention, WeightVector,
};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "msdecomp",
    version,
    about = "Evaluate and compare monolith-to-microservice decompositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute SM, IFN, ICP and NED for one decomposition of a graph.
    Evaluate(EvaluateArgs),
    /// Score and rank competing decompositions of one system.
    Compare(CompareArgs),
    /// Produce a decomposition with one of the built-in algorithms.
    Decompose(DecomposeArgs),
    /// Sample a planted-partition graph and its ground-truth decomposition.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Markdown,
    Csv,
    Structured,
}

impl From<Format> for RenderFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Markdown => RenderFormat::Markdown,
            Format::Csv => RenderFormat::Csv,
            Format::Structured => RenderFormat::Structured,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SmSourceArg {
    StaticDistinct,
    StaticWeighted,
    RuntimeWeighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum IcpSourceArg {
    RuntimeElseStatic,
    RuntimeOnly,
    StaticOnly,
}

#[derive(Args)]
struct PolicyArgs {
    /// Edges feeding SM and IFN.
    #[arg(long, value_enum, default_value = "static-distinct")]
    sm_source: SmSourceArg,
    /// Call counts feeding ICP.
    #[arg(long, value_enum, default_value = "runtime-else-static")]
    icp_source: IcpSourceArg,
    /// Leave self-calls out of service cohesion.
    #[arg(long)]
    no_self_cohesion: bool,
}

impl PolicyArgs {
    fn policy(&self) -> EdgePolicy {
        EdgePolicy {
            sm_source: match self.sm_source {
                SmSourceArg::StaticDistinct => SmSource::StaticDistinct,
                SmSourceArg::StaticWeighted => SmSource::StaticWeighted,
                SmSourceArg::RuntimeWeighted => SmSource::RuntimeWeighted,
            },
            icp_source: match self.icp_source {
                IcpSourceArg::RuntimeElseStatic => IcpSource::RuntimeElseStatic,
                IcpSourceArg::RuntimeOnly => IcpSource::RuntimeOnly,
                IcpSourceArg::StaticOnly => IcpSource::StaticOnly,
            },
            include_self_edges_in_cohesion: !self.no_self_cohesion,
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    decomposition: PathBuf,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StdArg {
    Population,
    Sample,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["metrics", "graph"])))]
struct CompareArgs {
    /// Metric table (CSV: tool,sm,ifn,icp,ned[,micro]).
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Graph whose decompositions are evaluated; needs --decompositions.
    #[arg(long, requires = "decompositions")]
    graph: Option<PathBuf>,
    /// Directory of decomposition documents (*.json).
    #[arg(long, requires = "graph")]
    decompositions: Option<PathBuf>,
    /// Weights for SM, IFN, ICP, NED.
    #[arg(long, value_parser = parse_weights, default_value = "3,-1,-1,-1", allow_hyphen_values = true)]
    weights: WeightVector,
    #[arg(long = "std", value_enum, default_value = "population")]
    std_convention: StdArg,
    /// Benchmark label; defaults to the metric file stem or graph name.
    #[arg(long)]
    benchmark: Option<String>,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, value_enum, default_value = "markdown")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Monolith,
    Singletons,
    Random,
    Hillclimb,
    Hierarchical,
}

#[derive(Clone, Copy, ValueEnum)]
enum LinkageArg {
    Average,
    Single,
    Complete,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Service count for `random`.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    min_services: Option<usize>,
    #[arg(long)]
    max_services: Option<usize>,
    #[arg(long, value_enum, default_value = "average")]
    linkage: LinkageArg,
    /// Distance cut for `hierarchical`, in (0, 1].
    #[arg(long, conflicts_with = "clusters")]
    threshold: Option<f64>,
    /// Target cluster count for `hierarchical`.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = 1)]
    min_cluster_size: usize,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    services: usize,
    /// Inclusive block size range, LO:HI.
    #[arg(long, value_parser = parse_range::<usize>)]
    size_range: (usize, usize),
    #[arg(long)]
    p_intra: f64,
    #[arg(long)]
    p_inter: f64,
    #[arg(long)]
    seed: u64,
    /// Also emit runtime edges with counts drawn from LO:HI.
    #[arg(long, value_parser = parse_range::<u64>)]
    runtime_counts: Option<(u64, u64)>,
    /// Graph document path.
    #[arg(short, long)]
    output: PathBuf,
    /// Ground-truth decomposition path.
    #[arg(long)]
    truth: PathBuf,
}

fn parse_range<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<T>().map_err(|_| format!("`{v}` is not a valid bound"));
    Ok((parse(lo)?, parse(hi)?))
}

fn parse_weights(s: &str) -> Result<WeightVector, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number")))
        .collect::<Result<_, _>>()?;
    let [sm, ifn, icp, ned] = parts[..] else {
        return Err(format!("expected four comma-separated weights, got {}", parts.len()));
    };
    WeightVector::new(sm, ifn, icp, ned).map_err(|e| e.to_string())
}

/// A domain failure: error kind, where it happened, and the message.
struct Failure {
    kind: &'static str,
    location: String,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, location: impl AsRef<Path>, message: impl ToString) -> Self {
        Self {
            kind,
            location: location.as_ref().display().to_string(),
            message: message.to_string(),
        }
    }

    fn ingest(path: &Path, e: IngestError) -> Self {
        Self::new(e.kind(), path, e)
    }

    fn decompose(path: &Path, e: DecomposeError) -> Self {
        let kind = match e {
            DecomposeError::EmptyGraph => "EmptyGraph",
            DecomposeError::BadK { .. } => "BadK",
            DecomposeError::InfeasibleBounds { .. } => "InfeasibleBounds",
            DecomposeError::BadThreshold(_) => "BadThreshold",
            DecomposeError::InvalidParams(_) => "InvalidParams",
        };
        Self::new(kind, path, e)
    }

    fn metric(path: &Path, e: MetricError) -> Self {
        match e {
            MetricError::Partition(p) => Self::ingest(path, IngestError::Partition(p)),
            MetricError::NoRuntimeData => Self::new("NoRuntimeData", path, e),
            MetricError::InvalidBounds { .. } => Self::new("InvalidBounds", path, e),
        }
    }

    fn scoring(path: &Path, e: ScoringError) -> Self {
        let kind = match e {
            ScoringError::TooFewRows(_) => "TooFewRows",
            ScoringError::ZeroWeights => "ZeroWeights",
            ScoringError::NonFiniteWeight => "NonFiniteWeight",
        };
        Self::new(kind, path, e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new("IoError", path, e))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::new("IoError", path, e))
}

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_graph(path: &Path) -> Result<MonolithGraph, Failure> {
    load_graph(&read(path)?).map_err(|e| Failure::ingest(path, e))
}

fn evaluate(args: &EvaluateArgs) -> Outcome {
    let graph = read_graph(&args.graph)?;
    let path = &args.decomposition;
    let decomposition = load_decomposition(&read(path)?, &graph).map_err(|e| Failure::ingest(path, e))?;
    let report = evaluate_all(&graph, &decomposition, &args.policy.policy()).map_err(|e| Failure::metric(path, e))?;
    emit(args.output.as_deref(), &render_report(&report, args.format.into()))
}

fn rows_from_directory(graph: &MonolithGraph, dir: &Path, policy: &EdgePolicy) -> Result<Vec<MetricRow>, Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::new("IoError", dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let rows: Vec<MetricRow> = files
        .par_iter()
        .map(|path| {
            let d = load_decomposition(&read(path)?, graph).map_err(|e| Failure::ingest(path, e))?;
            let r = evaluate_all(graph, &d, policy).map_err(|e| Failure::metric(path, e))?;
            Ok(MetricRow::complete(r.tool.clone(), r.values(), Some(r.micro as u32)))
        })
        .collect::<Result<_, Failure>>()?;
    for (i, row) in rows.iter().enumerate() {
        if rows[..i].iter().any(|r| r.tool == row.tool) {
            return Err(Failure::new(
                "DuplicateTool",
                &files[i],
                format!("tool `{}` appears twice", row.tool),
            ));
        }
    }
    Ok(rows)
}

fn compare(args: &CompareArgs) -> Outcome {
    let (rows, origin, default_name) = match (&args.metrics, &args.graph, &args.decompositions) {
        (Some(path), _, _) => {
            let rows = load_metric_rows(&read(path)?).map_err(|e| Failure::ingest(path, e))?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            (rows, path.clone(), stem)
        }
        (None, Some(graph_path), Some(dir)) => {
            let graph = read_graph(graph_path)?;
            let rows = rows_from_directory(&graph, dir, &args.policy.policy())?;
            (rows, dir.clone(), graph.name().to_owned())
        }
        _ => unreachable!("clap enforces the argument groups"),
    };
    let convention = match args.std_convention {
        StdArg::Population => StdConvention::Population,
        StdArg::Sample => StdConvention::Sample,
    };
    let name = args.benchmark.clone().unwrap_or(default_name);
    let table = composite_scores(name, &rows, &args.weights, convention).map_err(|e| Failure::scoring(&origin, e))?;
    emit(args.output.as_deref(), &render_table(&table, args.format.into()))
}

fn decompose(args: &DecomposeArgs) -> Outcome {
    let graph = read_graph(&args.graph)?;
    let at = &args.graph;
    let decomposition = match args.algo {
        Algo::Monolith => decompose_monolith(&graph),
        Algo::Singletons => decompose_singletons(&graph),
        Algo::Random => {
            let Some(k) = args.k else {
                Cli::command()
                    .error(
                        clap::error::ErrorKind::MissingRequiredArgument,
                        "--algo random needs --k",
                    )
                    .exit();
            };
            decompose_random(&graph, k, args.seed)
        }
        Algo::Hillclimb => decompose_hillclimb(
            &graph,
            &HillClimbParams {
                restarts: args.restarts,
                max_iterations: args.max_iterations,
                min_services: args.min_services,
                max_services: args.max_services,
                seed: args.seed,
                policy: args.policy.policy(),
            },
        ),
        Algo::Hierarchical => decompose_hierarchical(
            &graph,
            &HierarchicalParams {
                linkage: match args.linkage {
                    LinkageArg::Average => Linkage::Average,
                    LinkageArg::Single => Linkage::Single,
                    LinkageArg::Complete => Linkage::Complete,
                },
                cut: match (args.clusters, args.threshold) {
                    (Some(k), _) => CutCriterion::TargetClusters(k),
                    (None, Some(t)) => CutCriterion::DistanceThreshold(t),
                    (None, None) => HierarchicalParams::default().cut,
                },
                min_cluster_size: args.min_cluster_size,
            },
        ),
    }
    .map_err(|e| Failure::decompose(at, e))?;
    emit(args.output.as_deref(), &save_decomposition(&decomposition))
}

fn generate(args: &GenerateArgs) -> Outcome {
    let spec = PlantedSpec {
        runtime_count_range: args.runtime_counts,
        ..PlantedSpec::new(args.services, args.size_range, args.p_intra, args.p_inter, args.seed)
    };
    let (graph, truth) = generate_planted(&spec).map_err(|e| Failure::ingest(Path::new("<generate>"), e))?;
    write(&args.output, &save_graph(&graph))?;
    write(&args.truth, &save_decomposition(&truth))
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Evaluate(a) => evaluate(a),
        Command::Compare(a) => compare(a),
        Command::Decompose(a) => decompose(a),
        Command::Generate(a) => generate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}: {}", f.kind, f.location, f.message);
            ExitCode::from(1)
        }
    }
}
