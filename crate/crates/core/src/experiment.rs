//! Multi-seed experiment runner, α/λ grid search, and report emission.
//!
//! A run is one (α, λ, seed) solver execution followed by assignment and
//! scoring. Runs are independent and execute in a work pool sharing the
//! read-only graph; results are collected in task order, so reports do not
//! depend on the degree of parallelism.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{load_edge_list, load_ground_truth, GroundTruth, LoaderOptions, SparseAdjacency};
use crate::metrics::{aggregate, assign_communities, modularity, nmi, MetricSummary, Partition};
use crate::solver::{solve, SolverConfig, TerminatedBy, Variant, YUpdateRule};

/// Version tag embedded in every JSON report.
pub const SCHEMA_VERSION: &str = "1";

/// Seeds either enumerate explicitly or derive from a base: run `i` of `r`
/// uses `base + i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSpec {
    Base(u64),
    List(Vec<u64>),
}

/// Full declarative description of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: PathBuf,
    pub ground_truth: Option<PathBuf>,
    pub largest_component: bool,
    pub variant: Variant,
    pub k: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub relative_tol: bool,
    pub init_scale: f64,
    pub epsilon: f64,
    pub y_update: YUpdateRule,
    /// Number of runs per grid cell.
    pub repeats: usize,
    pub seeds: SeedSpec,
    /// α candidates; absent means the single configured `alpha`.
    pub grid_alpha: Option<Vec<f64>>,
    /// λ candidates; absent means the single configured `lambda`.
    pub grid_lambda: Option<Vec<f64>>,
    /// Worker threads for the run pool; 0 uses the global default.
    pub jobs: usize,
}

impl ExperimentSpec {
    pub fn new(dataset: impl Into<PathBuf>, variant: Variant, k: usize) -> Self {
        let solver = SolverConfig::new(variant, k);
        ExperimentSpec {
            dataset: dataset.into(),
            ground_truth: None,
            largest_component: false,
            variant,
            k,
            alpha: solver.alpha,
            lambda: solver.lambda,
            max_iters: solver.max_iters,
            tol: solver.tol,
            relative_tol: solver.relative_tol,
            init_scale: solver.init_scale,
            epsilon: solver.epsilon,
            y_update: solver.y_update,
            repeats: 10,
            seeds: SeedSpec::Base(0),
            grid_alpha: None,
            grid_lambda: None,
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        if let SeedSpec::List(seeds) = &self.seeds {
            if seeds.len() != self.repeats {
                return Err(Error::InvalidConfig(format!(
                    "seed list has {} entries but repeats = {}",
                    seeds.len(),
                    self.repeats
                )));
            }
        }
        for (name, grid) in [("alpha", &self.grid_alpha), ("lambda", &self.grid_lambda)] {
            if let Some(values) = grid {
                if values.is_empty() {
                    return Err(Error::InvalidConfig(format!("{} grid is empty", name)));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "{} grid values must be finite and >= 0",
                        name
                    )));
                }
            }
        }
        Ok(())
    }

    /// The per-run seeds in order.
    pub fn resolved_seeds(&self) -> Vec<u64> {
        match &self.seeds {
            SeedSpec::Base(base) => (0..self.repeats as u64).map(|i| base + i).collect(),
            SeedSpec::List(list) => list.clone(),
        }
    }

    /// All (α, λ) cells in α-outer order.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let alphas = self
            .grid_alpha
            .clone()
            .unwrap_or_else(|| vec![self.alpha]);
        let lambdas = self
            .grid_lambda
            .clone()
            .unwrap_or_else(|| vec![self.lambda]);
        alphas
            .iter()
            .flat_map(|&a| lambdas.iter().map(move |&l| (a, l)))
            .collect()
    }

    fn solver_config(&self, alpha: f64, lambda: f64, seed: u64) -> SolverConfig {
        SolverConfig {
            variant: self.variant,
            k: self.k,
            alpha,
            lambda,
            seed,
            max_iters: self.max_iters,
            tol: self.tol,
            relative_tol: self.relative_tol,
            init_scale: self.init_scale,
            epsilon: self.epsilon,
            y_update: self.y_update,
        }
    }
}

/// Outcome of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub seed: u64,
    pub status: RunStatus,
    pub iterations: usize,
    pub terminated_by: Option<TerminatedBy>,
    pub final_objective: Option<f64>,
    pub kkt_residual: Option<f64>,
    pub nmi: Option<f64>,
    pub modularity: Option<f64>,
    /// Objective after every iteration, empty when the run failed.
    pub objective_trajectory: Vec<f64>,
}

/// Per-(α, λ) aggregates over the completed runs of that cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub alpha: f64,
    pub lambda: f64,
    pub completed: usize,
    /// Failed runs excluded from the aggregates.
    pub excluded: usize,
    pub nmi: Option<MetricSummary>,
    pub modularity: Option<MetricSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestCell {
    pub alpha: f64,
    pub lambda: f64,
    pub mean_modularity: f64,
}

/// Self-describing result of an experiment; serializing the embedded spec
/// reproduces the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: String,
    pub toolkit_version: String,
    pub spec: ExperimentSpec,
    pub nodes: usize,
    pub edges: usize,
    pub runs: Vec<RunRecord>,
    pub cells: Vec<CellAggregate>,
    pub best_cell: Option<BestCell>,
    pub failed_runs: usize,
}

/// Output format of [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Load the dataset named by the spec and run every (cell, seed) pair.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let options = LoaderOptions {
        largest_component: spec.largest_component,
    };
    let (adjacency, index) = load_edge_list(&spec.dataset, options)?;
    let ground_truth = match &spec.ground_truth {
        Some(path) => Some(load_ground_truth(path, &index)?),
        None => None,
    };
    run_on_graph(&adjacency, ground_truth.as_ref(), spec)
}

/// Like [`run_experiment`] but on an already-loaded graph.
pub fn run_on_graph(
    adjacency: &SparseAdjacency,
    ground_truth: Option<&GroundTruth>,
    spec: &ExperimentSpec,
) -> Result<ExperimentReport> {
    spec.validate()?;
    if let Some(gt) = ground_truth {
        if gt.labels.len() != adjacency.n() {
            return Err(Error::InvalidConfig(format!(
                "ground truth covers {} nodes, graph has {}",
                gt.labels.len(),
                adjacency.n()
            )));
        }
    }
    let seeds = spec.resolved_seeds();
    let cells = spec.cells();
    // Fail fast on solver configuration problems before spawning runs.
    for &(alpha, lambda) in &cells {
        spec.solver_config(alpha, lambda, seeds[0]).validate(adjacency.n())?;
    }
    let mut tasks: Vec<(usize, f64, f64, u64)> = Vec::with_capacity(cells.len() * seeds.len());
    for &(alpha, lambda) in &cells {
        for &seed in &seeds {
            tasks.push((tasks.len(), alpha, lambda, seed));
        }
    }
    let execute = || -> Result<Vec<RunRecord>> {
        tasks
            .par_iter()
            .map(|&(run_index, alpha, lambda, seed)| {
                run_single(adjacency, ground_truth, spec, run_index, alpha, lambda, seed)
            })
            .collect()
    };
    let runs = if spec.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {}", e)))?;
        pool.install(execute)?
    } else {
        execute()?
    };
    let mut aggregates = Vec::with_capacity(cells.len());
    for (ci, &(alpha, lambda)) in cells.iter().enumerate() {
        let cell_runs = &runs[ci * seeds.len()..(ci + 1) * seeds.len()];
        let completed: Vec<&RunRecord> = cell_runs
            .iter()
            .filter(|r| r.status == RunStatus::Ok)
            .collect();
        let collect = |f: fn(&RunRecord) -> Option<f64>| -> Option<MetricSummary> {
            let values: Vec<f64> = completed.iter().filter_map(|r| f(r)).collect();
            if values.is_empty() {
                None
            } else {
                Some(aggregate(&values).expect("nonempty"))
            }
        };
        aggregates.push(CellAggregate {
            alpha,
            lambda,
            completed: completed.len(),
            excluded: cell_runs.len() - completed.len(),
            nmi: collect(|r| r.nmi),
            modularity: collect(|r| r.modularity),
        });
    }
    let failed_runs = runs.iter().filter(|r| r.status != RunStatus::Ok).count();
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION.to_string(),
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        nodes: adjacency.n(),
        edges: adjacency.edge_count(),
        runs,
        cells: aggregates,
        best_cell: None,
        failed_runs,
    })
}

fn run_single(
    adjacency: &SparseAdjacency,
    ground_truth: Option<&GroundTruth>,
    spec: &ExperimentSpec,
    run_index: usize,
    alpha: f64,
    lambda: f64,
    seed: u64,
) -> Result<RunRecord> {
    let config = spec.solver_config(alpha, lambda, seed);
    match solve(adjacency, &config) {
        Ok((pair, trace)) => {
            let partition = assign_communities(&pair.y)?;
            let q = modularity(adjacency, &partition)?;
            let score = match ground_truth {
                Some(gt) => Some(nmi(&Partition::from(gt), &partition)?),
                None => None,
            };
            Ok(RunRecord {
                run_index,
                alpha,
                lambda,
                seed,
                status: RunStatus::Ok,
                iterations: trace.iters_run,
                terminated_by: Some(trace.terminated_by),
                final_objective: trace.objective.last().copied(),
                kkt_residual: Some(trace.kkt_residual),
                nmi: score,
                modularity: Some(q),
                objective_trajectory: trace.objective,
            })
        }
        Err(err @ Error::NonFiniteObjective { .. }) => Ok(RunRecord {
            run_index,
            alpha,
            lambda,
            seed,
            status: RunStatus::Failed {
                reason: err.to_string(),
            },
            iterations: 0,
            terminated_by: None,
            final_objective: None,
            kkt_residual: None,
            nmi: None,
            modularity: None,
            objective_trajectory: Vec::new(),
        }),
        Err(other) => Err(other),
    }
}

/// Run every grid cell and select the one maximizing mean modularity,
/// breaking ties toward smaller α, then smaller λ.
pub fn grid_search(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    if spec.grid_alpha.is_none() && spec.grid_lambda.is_none() {
        return Err(Error::InvalidConfig(
            "grid search needs at least one of the alpha/lambda candidate lists".into(),
        ));
    }
    let mut report = run_experiment(spec)?;
    report.best_cell = select_best_cell(&report.cells);
    Ok(report)
}

/// Grid selection on an already-computed report (used by tests and the CLI
/// when the graph is generated in-process).
pub fn select_best_cell(cells: &[CellAggregate]) -> Option<BestCell> {
    cells
        .iter()
        .filter_map(|c| {
            c.modularity
                .as_ref()
                .map(|m| (c.alpha, c.lambda, m.mean))
        })
        .max_by(|a, b| {
            a.2.partial_cmp(&b.2)
                .expect("aggregated modularity is finite")
                .then(b.0.partial_cmp(&a.0).expect("alpha is finite"))
                .then(b.1.partial_cmp(&a.1).expect("lambda is finite"))
        })
        .map(|(alpha, lambda, mean_modularity)| BestCell {
            alpha,
            lambda,
            mean_modularity,
        })
}

fn term_str(t: Option<TerminatedBy>) -> &'static str {
    match t {
        Some(TerminatedBy::Tolerance) => "tolerance",
        Some(TerminatedBy::MaxIters) => "max_iters",
        None => "",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write the report under `out_dir` and return the created file paths.
///
/// JSON emits one self-contained `report.json`. CSV emits `runs.csv`,
/// `aggregates.csv`, and one `trajectories/run_NNNN.csv` per completed run
/// holding `iteration,objective` rows for external plotting.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    match format {
        ReportFormat::Json => {
            let path = out_dir.join("report.json");
            let mut body = serde_json::to_string_pretty(report)
                .map_err(|e| Error::InvalidParameter(format!("serialization failed: {}", e)))?;
            body.push('\n');
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        ReportFormat::Csv => {
            let mut runs = String::from(
                "run_index,alpha,lambda,seed,status,iterations,terminated_by,final_objective,nmi,modularity,kkt_residual\n",
            );
            for r in &report.runs {
                let status = match &r.status {
                    RunStatus::Ok => "ok".to_string(),
                    RunStatus::Failed { reason } => format!("failed: {}", reason.replace(',', ";")),
                };
                writeln!(
                    runs,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.run_index,
                    r.alpha,
                    r.lambda,
                    r.seed,
                    status,
                    r.iterations,
                    term_str(r.terminated_by),
                    opt(r.final_objective),
                    opt(r.nmi),
                    opt(r.modularity),
                    opt(r.kkt_residual),
                )
                .expect("writing to String cannot fail");
            }
            let path = out_dir.join("runs.csv");
            fs::write(&path, runs).map_err(|e| Error::io(&path, e))?;
            written.push(path);

            let mut cells = String::from(
                "alpha,lambda,completed,excluded,nmi_mean,nmi_std,modularity_mean,modularity_std\n",
            );
            for c in &report.cells {
                writeln!(
                    cells,
                    "{},{},{},{},{},{},{},{}",
                    c.alpha,
                    c.lambda,
                    c.completed,
                    c.excluded,
                    opt(c.nmi.as_ref().map(|m| m.mean)),
                    opt(c.nmi.as_ref().map(|m| m.std)),
                    opt(c.modularity.as_ref().map(|m| m.mean)),
                    opt(c.modularity.as_ref().map(|m| m.std)),
                )
                .expect("writing to String cannot fail");
            }
            let path = out_dir.join("aggregates.csv");
            fs::write(&path, cells).map_err(|e| Error::io(&path, e))?;
            written.push(path);

            let traj_dir = out_dir.join("trajectories");
            fs::create_dir_all(&traj_dir).map_err(|e| Error::io(&traj_dir, e))?;
            for r in &report.runs {
                if r.objective_trajectory.is_empty() {
                    continue;
                }
                let mut body = String::from("iteration,objective\n");
                for (i, v) in r.objective_trajectory.iter().enumerate() {
                    writeln!(body, "{},{}", i, v).expect("writing to String cannot fail");
                }
                let path = traj_dir.join(format!("run_{:04}.csv", r.run_index));
                fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
