//! Shared oracles and instance generators for the integration suites.
//!
//! Everything here recomputes quantities through a different route than the
//! library (dense matrices, double loops, entropy identities) so that the
//! two sides stay independent.

#![allow(dead_code)]

use std::path::PathBuf;

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use sgnmf_core::{GroundTruth, LoaderOptions, Partition, SparseAdjacency};

/// Dense copy of the adjacency matrix.
pub fn dense_adjacency(a: &SparseAdjacency) -> Array2<f64> {
    let mut d = Array2::<f64>::zeros((a.n(), a.n()));
    for (i, j, w) in a.entries() {
        d[[i, j]] = w;
    }
    d
}

/// Trace-form objective evaluated with dense matrices:
/// `½Tr(XYᵀYXᵀ − 2AYXᵀ + AAᵀ) + (λ/2)Tr(YᵀLY) + (α/2)Tr(XXᵀ − 2XYᵀ + YYᵀ)`.
pub fn objective_trace_form(
    a: &SparseAdjacency,
    x: &Array2<f64>,
    y: &Array2<f64>,
    alpha: f64,
    lambda: f64,
) -> f64 {
    let ad = dense_adjacency(a);
    let trace = |m: &Array2<f64>| -> f64 { m.diag().sum() };
    let xyt = x.dot(&y.t());
    let fit = trace(&xyt.dot(y).dot(&x.t())) - 2.0 * trace(&ad.dot(y).dot(&x.t()))
        + trace(&ad.dot(&ad.t()));
    // L = D − S built densely
    let mut lap = -&ad;
    for i in 0..a.n() {
        let row_sum: f64 = ad.row(i).sum();
        lap[[i, i]] += row_sum;
    }
    let graph = trace(&y.t().dot(&lap).dot(y));
    let sym = trace(&x.dot(&x.t())) - 2.0 * trace(&x.dot(&y.t())) + trace(&y.dot(&y.t()));
    0.5 * fit + 0.5 * lambda * graph + 0.5 * alpha * sym
}

/// Shannon entropy of a labeling, natural log.
fn entropy_of(labels: &[usize]) -> f64 {
    let max = labels.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0usize; max + 1];
    for &l in labels {
        counts[l] += 1;
    }
    let n = labels.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// NMI recomputed through the entropy identity `I = H(p) + H(q) − H(p,q)`.
pub fn nmi_oracle(p: &[usize], q: &[usize]) -> f64 {
    assert_eq!(p.len(), q.len());
    let h_p = entropy_of(p);
    let h_q = entropy_of(q);
    if h_p + h_q == 0.0 {
        return 1.0;
    }
    let joint: Vec<usize> = {
        let cols = q.iter().copied().max().unwrap_or(0) + 1;
        p.iter().zip(q.iter()).map(|(&a, &b)| a * cols + b).collect()
    };
    let h_joint = entropy_of(&compact(&joint));
    let mutual = (h_p + h_q - h_joint).max(0.0);
    (2.0 * mutual / (h_p + h_q)).clamp(0.0, 1.0)
}

fn compact(labels: &[usize]) -> Vec<usize> {
    let mut seen = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = seen.len();
            *seen.entry(l).or_insert(next)
        })
        .collect()
}

/// Newman modularity via the dense double loop over all node pairs.
pub fn modularity_oracle(a: &SparseAdjacency, labels: &[usize]) -> f64 {
    let ad = dense_adjacency(a);
    let n = a.n();
    let degrees: Vec<f64> = (0..n).map(|i| ad.row(i).sum()).collect();
    let two_m: f64 = degrees.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += ad[[i, j]] - degrees[i] * degrees[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Random connected-ish undirected graph with the given weight range.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    edge_prob: f64,
    weights: Option<(f64, f64)>,
) -> SparseAdjacency {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < edge_prob {
                let w = match weights {
                    Some((lo, hi)) => lo + (hi - lo) * rng.random::<f64>(),
                    None => 1.0,
                };
                edges.push((i, j, w));
            }
        }
    }
    if edges.is_empty() {
        // fall back to a path so the instance is never degenerate
        for i in 0..n.saturating_sub(1) {
            edges.push((i, i + 1, 1.0));
        }
    }
    SparseAdjacency::from_undirected_edges(n, &edges).unwrap()
}

/// Random positive factor matrix with entries in `[lo, hi)`.
pub fn random_factor(rng: &mut ChaCha8Rng, n: usize, k: usize, lo: f64, hi: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, k), |_| lo + (hi - lo) * rng.random::<f64>())
}

/// Root of the optional benchmark-dataset directory (`SGNMF_DATA_DIR`, or
/// `data/` at the repository root).
pub fn dataset_root() -> PathBuf {
    match std::env::var_os("SGNMF_DATA_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

/// Load `<root>/<name>/edges.txt` and `<root>/<name>/labels.txt` if both
/// exist; `None` when the dataset is not provided.
pub fn load_benchmark(name: &str) -> Option<(SparseAdjacency, GroundTruth)> {
    let dir = dataset_root().join(name);
    let edges = dir.join("edges.txt");
    let labels = dir.join("labels.txt");
    if !edges.is_file() || !labels.is_file() {
        return None;
    }
    let (a, index) = sgnmf_core::load_edge_list(&edges, LoaderOptions::default())
        .unwrap_or_else(|e| panic!("{} present but unreadable: {}", edges.display(), e));
    let gt = sgnmf_core::load_ground_truth(&labels, &index)
        .unwrap_or_else(|e| panic!("{} present but unreadable: {}", labels.display(), e));
    Some((a, gt))
}

/// Mean NMI of a multi-seed run against ground truth.
pub fn mean_nmi_over_seeds(
    a: &SparseAdjacency,
    gt: &GroundTruth,
    config: &sgnmf_core::SolverConfig,
    seeds: std::ops::Range<u64>,
) -> f64 {
    let truth = Partition::from(gt);
    let mut scores = Vec::new();
    for seed in seeds {
        let mut c = config.clone();
        c.seed = seed;
        let (pair, _) = sgnmf_core::solve(a, &c).unwrap();
        let p = sgnmf_core::assign_communities(&pair.y).unwrap();
        scores.push(sgnmf_core::nmi(&truth, &p).unwrap());
    }
    scores.iter().sum::<f64>() / scores.len() as f64
}
