//! Undirected network storage and access.
//!
//! The adjacency matrix is kept in compressed sparse row form with both
//! triangles stored, so `A == Aᵀ` holds structurally and row access is a
//! contiguous slice. The degree vector and Laplacian products needed by the
//! solver and metrics are served from here.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Symmetric nonnegative adjacency matrix in CSR layout, with degrees.
///
/// Immutable after construction; safe to share across concurrent solver runs.
#[derive(Debug, Clone)]
pub struct SparseAdjacency {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    weights: Vec<f64>,
    degree: Vec<f64>,
}

/// Bijection between original node labels and dense indices.
///
/// Nodes removed by the largest-component filter keep their labels recorded
/// (`get` returns `None` for them) so downstream loaders can tell a filtered
/// node apart from an unknown token.
#[derive(Debug, Clone)]
pub struct NodeIndex {
    labels: Vec<String>,
    by_label: HashMap<String, Option<usize>>,
}

/// One community id per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub labels: Vec<usize>,
}

/// Options accepted by [`load_edge_list`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LoaderOptions {
    /// Keep only the largest connected component, reindexing densely.
    pub largest_component: bool,
}

impl SparseAdjacency {
    /// Build from a list of undirected edges `(i, j, w)` with `i, j < n`.
    ///
    /// Self-loops are dropped and zero weights skipped, matching the loader.
    /// Duplicate pairs (in either orientation) have their weights summed.
    pub fn from_undirected_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut pairs: HashMap<(usize, usize), f64> = HashMap::new();
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) out of range for n = {}",
                    i, j, n
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) has invalid weight {}",
                    i, j, w
                )));
            }
            if i == j || w == 0.0 {
                continue;
            }
            *pairs.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        Ok(Self::from_pairs(n, pairs))
    }

    /// Assemble CSR arrays from deduplicated upper-triangle pairs.
    fn from_pairs(n: usize, pairs: HashMap<(usize, usize), f64>) -> Self {
        let mut counts = vec![0usize; n];
        for &(i, j) in pairs.keys() {
            counts[i] += 1;
            counts[j] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        let nnz = row_ptr[n];
        let mut col_idx = vec![0usize; nnz];
        let mut weights = vec![0.0f64; nnz];
        let mut cursor = row_ptr.clone();
        let mut sorted: Vec<(&(usize, usize), &f64)> = pairs.iter().collect();
        sorted.sort_unstable_by_key(|(k, _)| **k);
        for (&(i, j), &w) in sorted {
            col_idx[cursor[i]] = j;
            weights[cursor[i]] = w;
            cursor[i] += 1;
            col_idx[cursor[j]] = i;
            weights[cursor[j]] = w;
            cursor[j] += 1;
        }
        // Column order within a row must be ascending for deterministic sums.
        for i in 0..n {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            let mut row: Vec<(usize, f64)> = col_idx[lo..hi]
                .iter()
                .copied()
                .zip(weights[lo..hi].iter().copied())
                .collect();
            row.sort_unstable_by_key(|&(c, _)| c);
            for (k, (c, w)) in row.into_iter().enumerate() {
                col_idx[lo + k] = c;
                weights[lo + k] = w;
            }
        }
        let degree = (0..n)
            .map(|i| weights[row_ptr[i]..row_ptr[i + 1]].iter().sum())
            .collect();
        SparseAdjacency {
            n,
            row_ptr,
            col_idx,
            weights,
            degree,
        }
    }

    /// Node count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored entries (twice the undirected edge count).
    pub fn entry_count(&self) -> usize {
        self.col_idx.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.entry_count() / 2
    }

    /// Degree vector, `degree[i] = Σ_j A_ij`.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Total weight `Σ_ij A_ij` (twice the undirected edge weight sum).
    pub fn total_weight(&self) -> f64 {
        self.degree.iter().sum()
    }

    /// `Σ_ij A_ij²`.
    pub fn frobenius_sq(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }

    /// Neighbors and weights of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[lo..hi], &self.weights[lo..hi])
    }

    /// Iterate all stored entries `(i, j, w)`, both triangles.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, ws) = self.row(i);
            cols.iter().zip(ws.iter()).map(move |(&j, &w)| (i, j, w))
        })
    }

    /// Iterate each undirected edge once as `(i, j, w)` with `i < j`.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries().filter(|&(i, j, _)| i < j)
    }

    /// Sparse-dense product `A·M` for a dense `n×K` matrix.
    ///
    /// `A` is symmetric, so this also serves as `Aᵀ·M`. Summation order is
    /// fixed (ascending column index per row), keeping results deterministic.
    pub fn spmm(&self, m: &Array2<f64>) -> Result<Array2<f64>> {
        if m.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                context: "spmm",
                expected: (self.n, m.ncols()),
                got: (m.nrows(), m.ncols()),
            });
        }
        let k = m.ncols();
        let mut out = Array2::<f64>::zeros((self.n, k));
        for i in 0..self.n {
            let (cols, ws) = self.row(i);
            let mut acc = out.row_mut(i);
            for (&j, &w) in cols.iter().zip(ws.iter()) {
                acc.scaled_add(w, &m.row(j));
            }
        }
        Ok(out)
    }

    /// Row-scale a dense matrix by the degree vector: `D·M`.
    pub fn scale_rows_by_degree(&self, m: &Array2<f64>) -> Result<Array2<f64>> {
        if m.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                context: "scale_rows_by_degree",
                expected: (self.n, m.ncols()),
                got: (m.nrows(), m.ncols()),
            });
        }
        let mut out = m.clone();
        for (i, mut row) in out.rows_mut().into_iter().enumerate() {
            row *= self.degree[i];
        }
        Ok(out)
    }

    /// `Tr(Yᵀ L Y)` with `L = D − S` and `S = A`, evaluated as
    /// `Σ_ik d_i y_ik² − ⟨Y, A·Y⟩`. Nonnegative up to roundoff.
    pub fn laplacian_quadratic(&self, y: &Array2<f64>) -> Result<f64> {
        if y.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                context: "laplacian_quadratic",
                expected: (self.n, y.ncols()),
                got: (y.nrows(), y.ncols()),
            });
        }
        let ay = self.spmm(y)?;
        let mut deg_term = 0.0;
        for (i, row) in y.rows().into_iter().enumerate() {
            deg_term += self.degree[i] * row.iter().map(|v| v * v).sum::<f64>();
        }
        let cross: f64 = y.iter().zip(ay.iter()).map(|(a, b)| a * b).sum();
        Ok(deg_term - cross)
    }

    /// Connected component id per node (ids in first-seen order) and count.
    pub fn connected_components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            queue.push(start);
            while let Some(u) = queue.pop() {
                let (cols, _) = self.row(u);
                for &v in cols {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    /// Write each undirected edge once as `label_i label_j weight`.
    pub fn save_edge_list(&self, path: &Path, index: &NodeIndex) -> Result<()> {
        let mut text = String::new();
        for (i, j, w) in self.undirected_edges() {
            writeln!(text, "{} {} {}", index.label(i), index.label(j), w)
                .expect("writing to String cannot fail");
        }
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

impl NodeIndex {
    /// Index for nodes labeled `"0"..="n-1"`, used by synthetic generators.
    pub fn dense(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let by_label = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), Some(i)))
            .collect();
        NodeIndex { labels, by_label }
    }

    /// Number of in-graph nodes.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Original label of a dense index.
    pub fn label(&self, dense: usize) -> &str {
        &self.labels[dense]
    }

    /// Dense index for a label; `None` if the node was filtered out.
    pub fn get(&self, label: &str) -> Option<usize> {
        self.by_label.get(label).copied().flatten()
    }

    /// Whether the label was ever seen, even if later filtered out.
    pub fn knows(&self, label: &str) -> bool {
        self.by_label.contains_key(label)
    }
}

impl GroundTruth {
    /// Number of distinct communities.
    pub fn communities(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }
}

/// Load an undirected graph from a whitespace-separated edge list.
///
/// Each non-comment line holds two node tokens and an optional positive
/// weight. Lines starting with `#` or `%` and blank lines are ignored.
/// Self-loops are dropped, both edge-orientation conventions are accepted,
/// and dense indices follow first appearance in the file.
///
/// Duplicate occurrences of an undirected edge collapse to one entry:
/// unweighted duplicates collapse to weight 1, explicit weights are summed
/// (each unweighted occurrence counting 1). Files that list every edge in
/// both orientations should therefore carry weights at most once per edge.
pub fn load_edge_list(path: &Path, options: LoaderOptions) -> Result<(SparseAdjacency, NodeIndex)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels: Vec<String> = Vec::new();
    let mut by_label: HashMap<String, Option<usize>> = HashMap::new();
    let mut intern = |token: &str, labels: &mut Vec<String>| -> usize {
        if let Some(Some(i)) = by_label.get(token) {
            return *i;
        }
        let i = labels.len();
        labels.push(token.to_string());
        by_label.insert(token.to_string(), Some(i));
        i
    };
    // pair -> (weight sum, any occurrence carried an explicit weight)
    let mut pairs: HashMap<(usize, usize), (f64, bool)> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 && tokens.len() != 3 {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("expected 2 or 3 tokens, found {}", tokens.len()),
            ));
        }
        let weight = if tokens.len() == 3 {
            let w: f64 = tokens[2].parse().map_err(|_| {
                Error::parse(path, lineno + 1, format!("invalid weight '{}'", tokens[2]))
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("weight must be a finite nonnegative number, found {}", w),
                ));
            }
            Some(w)
        } else {
            None
        };
        let i = intern(tokens[0], &mut labels);
        let j = intern(tokens[1], &mut labels);
        if i == j || weight == Some(0.0) {
            continue; // self-loop or explicit zero: node registered, entry not stored
        }
        let slot = pairs.entry((i.min(j), i.max(j))).or_insert((0.0, false));
        slot.0 += weight.unwrap_or(1.0);
        slot.1 |= weight.is_some();
    }
    if pairs.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let collapsed: HashMap<(usize, usize), f64> = pairs
        .into_iter()
        .map(|(k, (sum, explicit))| (k, if explicit { sum } else { 1.0 }))
        .collect();
    let adjacency = SparseAdjacency::from_pairs(labels.len(), collapsed);
    let index = NodeIndex { labels, by_label };
    if options.largest_component {
        Ok(restrict_to_largest_component(adjacency, index))
    } else {
        Ok((adjacency, index))
    }
}

/// Keep only the largest connected component (ties: smallest member index),
/// reindexing nodes densely in their original order.
fn restrict_to_largest_component(
    adjacency: SparseAdjacency,
    index: NodeIndex,
) -> (SparseAdjacency, NodeIndex) {
    let (comp, count) = adjacency.connected_components();
    if count <= 1 {
        return (adjacency, index);
    }
    let mut sizes = vec![0usize; count];
    for &c in &comp {
        sizes[c] += 1;
    }
    // Component ids are assigned in first-seen order, so the first maximal
    // size also contains the smallest member index.
    let keep = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(c, _)| c)
        .unwrap_or(0);
    let mut remap = vec![usize::MAX; adjacency.n()];
    let mut kept_labels = Vec::with_capacity(sizes[keep]);
    for i in 0..adjacency.n() {
        if comp[i] == keep {
            remap[i] = kept_labels.len();
            kept_labels.push(index.labels[i].clone());
        }
    }
    let pairs: HashMap<(usize, usize), f64> = adjacency
        .undirected_edges()
        .filter(|&(i, j, _)| comp[i] == keep && comp[j] == keep)
        .map(|(i, j, w)| ((remap[i], remap[j]), w))
        .collect();
    let filtered = SparseAdjacency::from_pairs(kept_labels.len(), pairs);
    let new_position: HashMap<String, usize> = kept_labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    let mut by_label = index.by_label;
    for (label, dense) in by_label.iter_mut() {
        *dense = new_position.get(label).copied();
    }
    let new_index = NodeIndex {
        labels: kept_labels,
        by_label,
    };
    (filtered, new_index)
}

/// Load per-node community labels as `node_token community_token` lines.
///
/// Community ids are canonicalized to `0..C-1` in file order. Labels for
/// nodes removed by the largest-component filter are skipped; tokens never
/// seen by the graph loader are an error, as is an uncovered graph node.
pub fn load_ground_truth(path: &Path, index: &NodeIndex) -> Result<GroundTruth> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = vec![usize::MAX; index.len()];
    let mut community_ids: HashMap<String, usize> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("expected 'node community', found {} tokens", tokens.len()),
            ));
        }
        let dense = match index.get(tokens[0]) {
            Some(d) => d,
            None if index.knows(tokens[0]) => continue, // filtered out of the graph
            None => {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("unknown node token '{}'", tokens[0]),
                ));
            }
        };
        let next = community_ids.len();
        let cid = *community_ids
            .entry(tokens[1].to_string())
            .or_insert(next);
        if labels[dense] != usize::MAX && labels[dense] != cid {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("conflicting labels for node '{}'", tokens[0]),
            ));
        }
        labels[dense] = cid;
    }
    let missing: Vec<String> = (0..index.len())
        .filter(|&i| labels[i] == usize::MAX)
        .map(|i| index.label(i).to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingLabels(missing));
    }
    Ok(GroundTruth { labels })
}
