//! Community detection on undirected networks by nonnegative matrix
//! factorization.
//!
//! The adjacency matrix of an undirected graph is approximated as `XYᵀ` by
//! two nonnegative `n×K` factor matrices coupled through a symmetry
//! regularizer `(α/2)‖X−Y‖²_F` and a graph regularizer `(λ/2)Tr(YᵀLY)`;
//! communities are then read off `Y` by row-wise argmax and scored with NMI
//! against ground truth and with Newman modularity. Plain two-factor and
//! single-factor (symmetric) variants are included as baselines, all driven
//! by multiplicative update rules.
//!
//! The [`experiment`] module runs multi-seed experiments and α/λ grid
//! searches over these solvers and emits machine-readable reports; the
//! companion `sgnmf` binary exposes it on the command line.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod planted;
pub mod solver;

pub use error::{Error, Result};
pub use graph::{
    load_edge_list, load_ground_truth, GroundTruth, LoaderOptions, NodeIndex, SparseAdjacency,
};
pub use metrics::{aggregate, assign_communities, modularity, nmi, MetricSummary, Partition};
pub use planted::make_planted_partition;
pub use solver::{
    grad_x, grad_y, init_factors, kkt_residual, objective_sgnmf, solve, update_nmf, update_sgnmf,
    update_snmf_adjusted, update_snmf_naive, FactorPair, IterationTrace, SolverConfig,
    TerminatedBy, Variant, YUpdateRule,
};
