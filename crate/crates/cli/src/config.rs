//! TOML config file mirroring the experiment spec, and the merge rules:
//! built-in defaults, overridden by config keys, overridden by flags.

use std::path::PathBuf;

use serde::Deserialize;
use sgnmf_core::experiment::{ExperimentSpec, ReportFormat, SeedSpec};
use sgnmf_core::{Variant, YUpdateRule};

use crate::{CliError, ExperimentArgs};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub dataset: DatasetSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub edges: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub largest_component: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub variant: Option<String>,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub relative_tol: Option<bool>,
    pub init_scale: Option<f64>,
    pub epsilon: Option<f64>,
    pub unsplit_y_update: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub repeats: Option<usize>,
    pub base_seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub jobs: Option<usize>,
    pub grid_alpha: Option<Vec<f64>>,
    pub grid_lambda: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub format: Option<String>,
}

pub fn load_config(path: &std::path::Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {}", path.display(), e)))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {}", path.display(), e)))
}

fn parse_variant(name: &str) -> Result<Variant, CliError> {
    match name {
        "nmf" => Ok(Variant::Nmf),
        "snmf" => Ok(Variant::SnmfNaive),
        "snmf-adj" => Ok(Variant::SnmfAdjusted),
        "sgnmf" => Ok(Variant::Sgnmf),
        other => Err(CliError::Usage(format!(
            "unknown variant '{}'; expected nmf, snmf, snmf-adj, or sgnmf",
            other
        ))),
    }
}

fn parse_format(name: &str) -> Result<ReportFormat, CliError> {
    match name {
        "json" => Ok(ReportFormat::Json),
        "csv" => Ok(ReportFormat::Csv),
        other => Err(CliError::Usage(format!(
            "unknown format '{}'; expected json or csv",
            other
        ))),
    }
}

/// Comma-separated nonnegative reals, e.g. `0,0.00390625,1`.
pub fn parse_float_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{}: invalid number '{}'", what, t)))
        })
        .collect()
}

fn parse_seed_list(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| CliError::Usage(format!("--seeds: invalid seed '{}'", t)))
        })
        .collect()
}

/// Everything `run`/`grid` need after merging defaults, config, and flags.
pub struct Resolved {
    pub spec: ExperimentSpec,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

pub fn resolve(args: &ExperimentArgs) -> Result<Resolved, CliError> {
    let config = match &args.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };

    let dataset = args
        .dataset
        .clone()
        .or(config.dataset.edges.clone())
        .ok_or_else(|| CliError::Usage("--dataset is required (flag or config)".into()))?;

    let variant = match (&args.variant, &config.solver.variant) {
        (Some(v), _) => v.to_core(),
        (None, Some(name)) => parse_variant(name)?,
        (None, None) => Variant::Sgnmf,
    };
    let k = args
        .k
        .or(config.solver.k)
        .ok_or_else(|| CliError::Usage("--k is required (flag or config)".into()))?;

    let mut spec = ExperimentSpec::new(dataset, variant, k);
    spec.ground_truth = args.ground_truth.clone().or(config.dataset.ground_truth);
    spec.largest_component =
        args.largest_component || config.dataset.largest_component.unwrap_or(false);
    if let Some(v) = args.alpha.or(config.solver.alpha) {
        spec.alpha = v;
    }
    if let Some(v) = args.lambda.or(config.solver.lambda) {
        spec.lambda = v;
    }
    if let Some(v) = args.max_iters.or(config.solver.max_iters) {
        spec.max_iters = v;
    }
    if let Some(v) = args.tol.or(config.solver.tol) {
        spec.tol = v;
    }
    spec.relative_tol = args.relative_tol || config.solver.relative_tol.unwrap_or(false);
    if let Some(v) = args.init_scale.or(config.solver.init_scale) {
        spec.init_scale = v;
    }
    if let Some(v) = args.epsilon.or(config.solver.epsilon) {
        spec.epsilon = v;
    }
    if args.unsplit_y_update || config.solver.unsplit_y_update.unwrap_or(false) {
        spec.y_update = YUpdateRule::Unsplit;
    }
    if let Some(v) = args.jobs.or(config.experiment.jobs) {
        spec.jobs = v;
    }

    // Seeds: an explicit list pins both the seeds and the repeat count; a
    // single value acts as the base seed for `repeats` consecutive seeds.
    if config.experiment.base_seed.is_some() && config.experiment.seeds.is_some() {
        return Err(CliError::Usage(
            "config sets both base_seed and seeds; pick one".into(),
        ));
    }
    let flag_seeds = args.seeds.as_deref().map(parse_seed_list).transpose()?;
    let config_seeds = config.experiment.seeds.clone();
    let repeats = args.repeats.or(config.experiment.repeats);
    let seed_source = flag_seeds
        .or(config_seeds)
        .or(config.experiment.base_seed.map(|b| vec![b]));
    match seed_source {
        Some(seeds) if seeds.len() == 1 => {
            spec.seeds = SeedSpec::Base(seeds[0]);
            spec.repeats = repeats.unwrap_or(spec.repeats);
        }
        Some(seeds) => {
            if let Some(r) = repeats {
                if r != seeds.len() {
                    return Err(CliError::Usage(format!(
                        "--repeats {} conflicts with a list of {} seeds",
                        r,
                        seeds.len()
                    )));
                }
            }
            spec.repeats = seeds.len();
            spec.seeds = SeedSpec::List(seeds);
        }
        None => {
            spec.repeats = repeats.unwrap_or(spec.repeats);
        }
    }

    spec.grid_alpha = match &args.grid_alpha {
        Some(text) => Some(parse_float_list(text, "--grid-alpha")?),
        None => config.experiment.grid_alpha,
    };
    spec.grid_lambda = match &args.grid_lambda {
        Some(text) => Some(parse_float_list(text, "--grid-lambda")?),
        None => config.experiment.grid_lambda,
    };

    let out = args.out.clone().or(config.output.dir);
    let format = match (&args.format, &config.output.format) {
        (Some(f), _) => f.to_core(),
        (None, Some(name)) => parse_format(name)?,
        (None, None) => ReportFormat::Json,
    };
    Ok(Resolved { spec, out, format })
}
