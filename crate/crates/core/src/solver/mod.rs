//! Objective evaluation, multiplicative update rules, and the iterative
//! solver for the factorization model family.

mod factor;
mod objective;
mod solve;
mod updates;

pub use factor::{init_factors, FactorPair};
pub use objective::{grad_x, grad_y, kkt_residual, objective_sgnmf};
pub use solve::{solve, IterationTrace, SolverConfig, TerminatedBy, Variant, YUpdateRule};
pub use updates::{update_nmf, update_sgnmf, update_snmf_adjusted, update_snmf_naive};
