//! `sgnmf` — command-line community detection on undirected networks.
//!
//! Verbs: `run` executes a multi-seed experiment from flags and/or a TOML
//! config; `grid` sweeps α/λ candidates and reports the cell with the best
//! mean modularity; `gen` writes a planted-partition fixture; `inspect`
//! prints dataset statistics.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure
//! in all runs.

mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sgnmf_core::experiment::{emit_report, grid_search, run_experiment, ExperimentReport};
use sgnmf_core::{
    load_edge_list, make_planted_partition, Error as CoreError, LoaderOptions, NodeIndex, Variant,
};

use config::{resolve, Resolved};

#[derive(Parser)]
#[command(
    name = "sgnmf",
    version,
    about = "Community detection via regularized nonnegative matrix factorization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-seed experiment (optionally over α/λ grids).
    Run(ExperimentArgs),
    /// Sweep the α/λ grids and select the best cell by mean modularity.
    Grid(ExperimentArgs),
    /// Generate a planted-partition graph and its ground truth.
    Gen(GenArgs),
    /// Print dataset statistics: nodes, edges, degrees, components.
    Inspect(InspectArgs),
}

#[derive(Args)]
pub struct ExperimentArgs {
    /// TOML config file; command-line flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge-list file: two node tokens per line, optional weight.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Ground-truth file: "node community" per line (enables NMI).
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Community count K.
    #[arg(long)]
    k: Option<usize>,
    /// Symmetry regularization coefficient (default 2^-8).
    #[arg(long)]
    alpha: Option<f64>,
    /// Graph regularization coefficient (default 100).
    #[arg(long)]
    lambda: Option<f64>,
    /// Comma-separated seed list; a single value is the base seed and run i
    /// uses seed base+i.
    #[arg(long)]
    seeds: Option<String>,
    /// Runs per grid cell (default 10).
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Objective-difference stopping threshold (default 0.1).
    #[arg(long)]
    tol: Option<f64>,
    /// Interpret --tol relative to the current objective value.
    #[arg(long)]
    relative_tol: bool,
    /// Upper bound of the uniform factor initialization (default 0.05).
    #[arg(long)]
    init_scale: Option<f64>,
    /// Denominator guard added to every update ratio (default 1e-12).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Comma-separated α candidates.
    #[arg(long)]
    grid_alpha: Option<String>,
    /// Comma-separated λ candidates.
    #[arg(long)]
    grid_lambda: Option<String>,
    /// Directory for report files; without it only the summary is printed.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads for the run pool (0 = library default).
    #[arg(long)]
    jobs: Option<usize>,
    /// Keep only the largest connected component of the dataset.
    #[arg(long)]
    largest_component: bool,
    /// Use the Y update that carries the full Laplacian product on both
    /// sides instead of the nonnegative split (comparison only).
    #[arg(long)]
    unsplit_y_update: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Nmf,
    Snmf,
    SnmfAdj,
    Sgnmf,
}

impl VariantArg {
    fn to_core(self) -> Variant {
        match self {
            VariantArg::Nmf => Variant::Nmf,
            VariantArg::Snmf => Variant::SnmfNaive,
            VariantArg::SnmfAdj => Variant::SnmfAdjusted,
            VariantArg::Sgnmf => Variant::Sgnmf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl FormatArg {
    fn to_core(self) -> sgnmf_core::experiment::ReportFormat {
        match self {
            FormatArg::Json => sgnmf_core::experiment::ReportFormat::Json,
            FormatArg::Csv => sgnmf_core::experiment::ReportFormat::Csv,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Node count.
    #[arg(long)]
    nodes: usize,
    /// Number of planted blocks.
    #[arg(long)]
    communities: usize,
    /// Intra-block edge probability.
    #[arg(long)]
    p_in: f64,
    /// Inter-block edge probability (must be below --p-in).
    #[arg(long)]
    p_out: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for edges.txt and labels.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    largest_component: bool,
}

/// Error carrying the exit code classification.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(CoreError),
    AllRunsFailed(usize),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{}", msg),
            CliError::Core(e) => write!(f, "{}", e),
            CliError::AllRunsFailed(n) => {
                write!(f, "all {} runs failed numerically; see the report for reasons", n)
            }
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::AllRunsFailed(_) => 3,
            CliError::Core(e) => match e {
                CoreError::InvalidConfig(_) | CoreError::InvalidParameter(_) => 1,
                CoreError::NonFiniteObjective { .. } => 3,
                _ => 2,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; keep the spec'd usage exit code
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS // --help / --version
            };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run_command(&args, false),
        Command::Grid(args) => run_command(&args, true),
        Command::Gen(args) => gen_command(&args),
        Command::Inspect(args) => inspect_command(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}

/// Default candidate sets used by `grid` when no grids are supplied.
const DEFAULT_ALPHA_GRID: [f64; 8] = [
    0.0,
    0.0009765625, // 2^-10
    0.00390625,   // 2^-8
    0.015625,     // 2^-6
    0.0625,       // 2^-4
    0.25,         // 2^-2
    1.0,
    2.0,
];
const DEFAULT_LAMBDA_GRID: [f64; 8] = [0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0];

fn run_command(args: &ExperimentArgs, grid: bool) -> Result<(), CliError> {
    let Resolved {
        mut spec,
        out,
        format,
    } = resolve(args)?;
    if grid {
        if spec.grid_alpha.is_none() {
            spec.grid_alpha = Some(DEFAULT_ALPHA_GRID.to_vec());
        }
        if spec.grid_lambda.is_none() {
            spec.grid_lambda = Some(DEFAULT_LAMBDA_GRID.to_vec());
        }
    }
    let report = if grid {
        grid_search(&spec)?
    } else {
        run_experiment(&spec)?
    };
    print_summary(&report);
    if let Some(dir) = out {
        let files = emit_report(&report, format, &dir)?;
        println!("wrote {} file(s) under {}", files.len(), dir.display());
    }
    if !report.runs.is_empty() && report.failed_runs == report.runs.len() {
        return Err(CliError::AllRunsFailed(report.failed_runs));
    }
    Ok(())
}

fn print_summary(report: &ExperimentReport) {
    println!(
        "dataset: {} nodes, {} edges | variant {} | k = {} | {} run(s), {} failed",
        report.nodes,
        report.edges,
        report.spec.variant.as_str(),
        report.spec.k,
        report.runs.len(),
        report.failed_runs
    );
    for cell in &report.cells {
        let fmt_summary = |s: &Option<sgnmf_core::MetricSummary>| match s {
            Some(m) => format!("{:.4} ± {:.4}", m.mean, m.std),
            None => "n/a".to_string(),
        };
        println!(
            "  alpha {:>12} lambda {:>8}: modularity {} | nmi {} | {}/{} ok",
            cell.alpha,
            cell.lambda,
            fmt_summary(&cell.modularity),
            fmt_summary(&cell.nmi),
            cell.completed,
            cell.completed + cell.excluded,
        );
    }
    if let Some(best) = &report.best_cell {
        println!(
            "best cell: alpha = {}, lambda = {} (mean modularity {:.4})",
            best.alpha, best.lambda, best.mean_modularity
        );
    }
}

fn gen_command(args: &GenArgs) -> Result<(), CliError> {
    let (adjacency, truth) =
        make_planted_partition(args.nodes, args.communities, args.p_in, args.p_out, args.seed)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Core(CoreError::Io {
            path: args.out.clone(),
            source: e,
        }))?;
    let edges = args.out.join("edges.txt");
    adjacency.save_edge_list(&edges, &NodeIndex::dense(adjacency.n()))?;
    let labels_path = args.out.join("labels.txt");
    let body: String = truth
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| format!("{} {}\n", i, l))
        .collect();
    std::fs::write(&labels_path, body).map_err(|e| {
        CliError::Core(CoreError::Io {
            path: labels_path.clone(),
            source: e,
        })
    })?;
    println!(
        "wrote {} ({} nodes, {} edges) and {}",
        edges.display(),
        adjacency.n(),
        adjacency.edge_count(),
        labels_path.display()
    );
    Ok(())
}

fn inspect_command(args: &InspectArgs) -> Result<(), CliError> {
    let options = LoaderOptions {
        largest_component: args.largest_component,
    };
    let (a, _) = load_edge_list(&args.dataset, options)?;
    let degrees = a.degree();
    let max_degree = degrees.iter().cloned().fold(0.0f64, f64::max);
    let min_degree = degrees.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean_degree = a.total_weight() / a.n() as f64;
    let (_, components) = a.connected_components();
    println!("nodes:      {}", a.n());
    println!("edges:      {}", a.edge_count());
    println!("weight:     {}", a.total_weight() / 2.0);
    println!("components: {}", components);
    println!("degree:     min {min_degree}, mean {mean_degree:.4}, max {max_degree}");
    // histogram over integer-degree buckets, capped at 20 rows
    let mut counts = std::collections::BTreeMap::new();
    for &d in degrees {
        *counts.entry(d.round() as u64).or_insert(0usize) += 1;
    }
    let bucket_count = counts.len();
    println!("degree histogram ({} distinct):", bucket_count);
    for (degree, count) in counts.into_iter().take(20) {
        println!("  {:>6}: {}", degree, count);
    }
    if bucket_count > 20 {
        println!("  ... ({} more buckets)", bucket_count - 20);
    }
    Ok(())
}
