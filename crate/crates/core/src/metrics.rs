//! Hard community assignment and partition quality scores.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GroundTruth, SparseAdjacency};

/// One community id per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub labels: Vec<usize>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl From<Vec<usize>> for Partition {
    fn from(labels: Vec<usize>) -> Self {
        Partition { labels }
    }
}

impl From<&GroundTruth> for Partition {
    fn from(gt: &GroundTruth) -> Self {
        Partition {
            labels: gt.labels.clone(),
        }
    }
}

/// Mean and sample standard deviation over per-seed metric values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub values: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

/// Assign each node the community with the largest membership weight,
/// breaking ties toward the smaller column index.
pub fn assign_communities(y: &Array2<f64>) -> Result<Partition> {
    if y.nrows() == 0 || y.ncols() == 0 {
        return Err(Error::InvalidParameter(
            "membership matrix must be nonempty".into(),
        ));
    }
    let labels = y
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            let mut best_value = row[0];
            for (k, &v) in row.iter().enumerate().skip(1) {
                if v > best_value {
                    best = k;
                    best_value = v;
                }
            }
            best
        })
        .collect();
    Ok(Partition { labels })
}

fn contingency(p: &Partition, q: &Partition) -> (Vec<Vec<usize>>, Vec<usize>, Vec<usize>) {
    let rows = p.labels.iter().copied().max().unwrap_or(0) + 1;
    let cols = q.labels.iter().copied().max().unwrap_or(0) + 1;
    let mut table = vec![vec![0usize; cols]; rows];
    for (&a, &b) in p.labels.iter().zip(q.labels.iter()) {
        table[a][b] += 1;
    }
    let row_sums = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums = (0..cols)
        .map(|c| table.iter().map(|r| r[c]).sum())
        .collect();
    (table, row_sums, col_sums)
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `2·I(p;q) / (H(p) + H(q))` with natural
/// logarithms, in `[0, 1]`.
///
/// Two single-cluster partitions describe the same trivial grouping and
/// score 1; any other partition against a single-cluster one has zero
/// mutual information and scores 0.
pub fn nmi(p: &Partition, q: &Partition) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::InvalidParameter(format!(
            "partition lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    if p.is_empty() {
        return Err(Error::InvalidParameter("partitions are empty".into()));
    }
    let n = p.len() as f64;
    let (table, row_sums, col_sums) = contingency(p, q);
    let h_p = entropy(&row_sums, n);
    let h_q = entropy(&col_sums, n);
    if h_p + h_q == 0.0 {
        return Ok(1.0); // both single-cluster: identical partitions
    }
    let mut mutual = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let joint = c as f64 / n;
                mutual += joint * (n * c as f64 / (row_sums[i] as f64 * col_sums[j] as f64)).ln();
            }
        }
    }
    let value = 2.0 * mutual.max(0.0) / (h_p + h_q);
    Ok(value.clamp(0.0, 1.0))
}

/// Newman modularity `Q = (1/2m) Σ_ij (A_ij − d_i d_j / 2m) δ(p_i, p_j)`.
pub fn modularity(a: &SparseAdjacency, p: &Partition) -> Result<f64> {
    if p.len() != a.n() {
        return Err(Error::InvalidParameter(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            a.n()
        )));
    }
    let two_m = a.total_weight();
    if two_m == 0.0 {
        return Err(Error::InvalidParameter(
            "modularity is undefined on a graph with zero total weight".into(),
        ));
    }
    let communities = p.labels.iter().copied().max().unwrap_or(0) + 1;
    let mut internal = vec![0.0f64; communities];
    let mut degree_sum = vec![0.0f64; communities];
    for (i, &c) in p.labels.iter().enumerate() {
        degree_sum[c] += a.degree()[i];
    }
    for (i, j, w) in a.entries() {
        if p.labels[i] == p.labels[j] {
            internal[p.labels[i]] += w;
        }
    }
    let q = (0..communities)
        .map(|c| internal[c] / two_m - (degree_sum[c] / two_m).powi(2))
        .sum();
    Ok(q)
}

/// Mean and sample standard deviation (`r − 1` divisor; 0 for a single run).
pub fn aggregate(values: &[f64]) -> Result<MetricSummary> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot aggregate an empty run list".into(),
        ));
    }
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(MetricSummary {
        values: values.to_vec(),
        mean,
        std,
    })
}
