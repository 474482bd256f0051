//! Synthetic planted-partition graphs with known block communities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{GroundTruth, SparseAdjacency};

/// Generate a planted-partition graph: `k` contiguous blocks (sizes as equal
/// as possible, remainders spread one per block), intra-block edge
/// probability `p_in`, inter-block `p_out`, no self-loops. The ground truth
/// is the block assignment.
pub fn make_planted_partition(
    n: usize,
    k: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(SparseAdjacency, GroundTruth)> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= n, got n = {}, k = {}",
            n, k
        )));
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out >= p_in {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= p_out < p_in <= 1, got p_in = {}, p_out = {}",
            p_in, p_out
        )));
    }
    let base = n / k;
    let remainder = n % k;
    let mut labels = Vec::with_capacity(n);
    for block in 0..k {
        let size = base + usize::from(block < remainder);
        labels.extend(std::iter::repeat_n(block, size));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let adjacency = SparseAdjacency::from_undirected_edges(n, &edges)?;
    Ok((adjacency, GroundTruth { labels }))
}
