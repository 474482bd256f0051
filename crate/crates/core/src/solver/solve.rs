//! Iterative solver: configuration, termination, and the trace it leaves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SparseAdjacency;

use super::factor::{init_factors, FactorPair};
use super::objective::{kkt_residual, objective_sgnmf, residual_sq};
use super::updates::{update_nmf, update_sgnmf, update_snmf_adjusted, update_snmf_naive};

/// Model variant, each with its own objective and update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Two independent factors, `‖XYᵀ − A‖²_F`.
    #[serde(rename = "nmf")]
    Nmf,
    /// Single factor, `‖XXᵀ − A‖²_F`, plain ratio rule.
    #[serde(rename = "snmf")]
    SnmfNaive,
    /// Single factor with the damped `0.5 + r/2` multiplier.
    #[serde(rename = "snmf-adj")]
    SnmfAdjusted,
    /// Two factors coupled by symmetry and graph regularization.
    #[serde(rename = "sgnmf")]
    Sgnmf,
}

impl Variant {
    /// Variants that carry a single factor matrix.
    pub fn is_symmetric(self) -> bool {
        matches!(self, Variant::SnmfNaive | Variant::SnmfAdjusted)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Nmf => "nmf",
            Variant::SnmfNaive => "snmf",
            Variant::SnmfAdjusted => "snmf-adj",
            Variant::Sgnmf => "sgnmf",
        }
    }
}

/// Which form of the Y update carries the graph term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum YUpdateRule {
    /// `λSY` in the numerator, `λDY` in the denominator (nonnegative).
    #[default]
    #[serde(rename = "split")]
    Split,
    /// `λLY` on both sides; can produce negative factors. Comparison only.
    #[serde(rename = "unsplit")]
    Unsplit,
}

/// Everything a single solver run depends on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Community count K.
    pub k: usize,
    /// Symmetry regularization coefficient.
    pub alpha: f64,
    /// Graph regularization coefficient.
    pub lambda: f64,
    pub seed: u64,
    pub max_iters: usize,
    /// Objective-difference termination threshold.
    pub tol: f64,
    /// Interpret `tol` relative to the previous objective value.
    pub relative_tol: bool,
    /// Upper bound of the uniform initialization interval.
    pub init_scale: f64,
    /// Additive denominator guard.
    pub epsilon: f64,
    pub y_update: YUpdateRule,
}

impl SolverConfig {
    /// Defaults: `alpha = 2⁻⁸`, `lambda = 100`, 200 iterations, `tol = 0.1`,
    /// init in `(0, 0.05)`, `epsilon = 1e-12`.
    pub fn new(variant: Variant, k: usize) -> Self {
        SolverConfig {
            variant,
            k,
            alpha: 2f64.powi(-8),
            lambda: 100.0,
            seed: 0,
            max_iters: 200,
            tol: 1e-1,
            relative_tol: false,
            init_scale: 0.05,
            epsilon: 1e-12,
            y_update: YUpdateRule::Split,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.k > n {
            return Err(Error::InvalidConfig(format!(
                "k = {} exceeds node count {}",
                self.k, n
            )));
        }
        if self.alpha.is_nan() || self.alpha < 0.0 {
            return Err(Error::InvalidConfig(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return Err(Error::InvalidConfig(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidConfig(format!("tol must be > 0, got {}", self.tol)));
        }
        if !self.init_scale.is_finite() || self.init_scale <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "init_scale must be a positive finite number, got {}",
                self.init_scale
            )));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Regularization coefficients as seen by this variant's objective and
    /// stationarity conditions (the baselines carry none).
    fn effective_coefficients(&self) -> (f64, f64) {
        match self.variant {
            Variant::Sgnmf => (self.alpha, self.lambda),
            _ => (0.0, 0.0),
        }
    }
}

/// What ended the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminatedBy {
    #[serde(rename = "tolerance")]
    Tolerance,
    #[serde(rename = "max_iters")]
    MaxIters,
}

/// Objective trajectory and final diagnostics of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationTrace {
    /// Objective after every iteration, starting with the initial value
    /// (length `iters_run + 1`).
    pub objective: Vec<f64>,
    pub iters_run: usize,
    pub terminated_by: TerminatedBy,
    /// Final complementarity residual of the first-order conditions.
    pub kkt_residual: f64,
}

fn variant_objective(a: &SparseAdjacency, pair: &FactorPair, config: &SolverConfig) -> Result<f64> {
    match config.variant {
        Variant::Nmf => residual_sq(a, &pair.x, &pair.y),
        Variant::SnmfNaive | Variant::SnmfAdjusted => residual_sq(a, &pair.x, &pair.x),
        Variant::Sgnmf => objective_sgnmf(a, &pair.x, &pair.y, config.alpha, config.lambda),
    }
}

fn step(a: &SparseAdjacency, pair: &FactorPair, config: &SolverConfig) -> Result<FactorPair> {
    match config.variant {
        Variant::Nmf => update_nmf(a, &pair.x, &pair.y, config.epsilon),
        Variant::SnmfNaive => {
            let x = update_snmf_naive(a, &pair.x, config.epsilon)?;
            Ok(FactorPair { y: x.clone(), x })
        }
        Variant::SnmfAdjusted => {
            let x = update_snmf_adjusted(a, &pair.x, config.epsilon)?;
            Ok(FactorPair { y: x.clone(), x })
        }
        Variant::Sgnmf => update_sgnmf(
            a,
            &pair.x,
            &pair.y,
            config.alpha,
            config.lambda,
            config.epsilon,
            config.y_update,
        ),
    }
}

/// Run the configured variant to termination.
///
/// Initializes both factors from the seed (single-factor variants mirror X
/// into Y), iterates the variant's update, and stops once the objective
/// difference between consecutive iterations drops below `tol` or
/// `max_iters` is reached. A non-finite objective aborts with the iteration
/// index and offending value.
pub fn solve(a: &SparseAdjacency, config: &SolverConfig) -> Result<(FactorPair, IterationTrace)> {
    config.validate(a.n())?;
    let mut pair = init_factors(a.n(), config.k, config.seed, config.init_scale);
    if config.variant.is_symmetric() {
        pair.y = pair.x.clone();
    }
    let ensure_finite = |value: f64, iteration: usize| {
        if value.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteObjective { iteration, value })
        }
    };
    let mut objective = Vec::with_capacity(config.max_iters + 1);
    let mut previous = variant_objective(a, &pair, config)?;
    ensure_finite(previous, 0)?;
    objective.push(previous);
    let mut terminated_by = TerminatedBy::MaxIters;
    let mut iters_run = config.max_iters;
    for t in 1..=config.max_iters {
        pair = step(a, &pair, config)?;
        let value = variant_objective(a, &pair, config)?;
        ensure_finite(value, t)?;
        objective.push(value);
        let delta = (value - previous).abs();
        let hit = if config.relative_tol {
            delta < config.tol * previous.abs().max(f64::MIN_POSITIVE)
        } else {
            delta < config.tol
        };
        previous = value;
        if hit {
            terminated_by = TerminatedBy::Tolerance;
            iters_run = t;
            break;
        }
    }
    let (alpha, lambda) = config.effective_coefficients();
    let kkt = kkt_residual(a, &pair.x, &pair.y, alpha, lambda)?;
    let trace = IterationTrace {
        objective,
        iters_run,
        terminated_by,
        kkt_residual: kkt,
    };
    Ok((pair, trace))
}
