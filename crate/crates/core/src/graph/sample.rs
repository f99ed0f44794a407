use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::csr::CsrGraph;
use super::edge_list::NodeId;
use super::features::mix_seed;

/// Picks `min(k, len)` distinct positions out of `0..len`, uniformly over
/// subsets, returned in ascending order. The result depends only on
/// `(len, k, seed, stream)`.
pub fn sample_positions(len: usize, k: usize, seed: u64, stream: u64) -> Vec<usize> {
    if k >= len {
        return (0..len).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, stream));
    let mut picked = rand::seq::index::sample(&mut rng, len, k).into_vec();
    picked.sort_unstable();
    picked
}

/// Fixed-size uniform sample of `node`'s out-neighbors (distinct edge
/// positions), in CSR order.
pub fn neighbor_sample(g: &CsrGraph, node: usize, k: usize, seed: u64) -> Vec<NodeId> {
    let row = g.neighbors(node);
    sample_positions(row.len(), k, seed, node as u64)
        .into_iter()
        .map(|p| row[p])
        .collect()
}
