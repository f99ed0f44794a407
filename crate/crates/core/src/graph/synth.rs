//! Seeded synthetic graphs matching requested statistics.

use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::csr::CsrGraph;
use super::edge_list::NodeId;
use super::features::{mix_seed, Features};
use super::stats::GraphStats;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DegreeDistribution {
    /// Sources drawn uniformly (binomial out-degrees).
    Uniform,
    /// Expected out-degree proportional to `rank^(-1/(exponent-1))`.
    PowerLaw { exponent: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthOptions {
    pub distribution: DegreeDistribution,
    /// Upper bound on the stored graph size in bytes.
    pub memory_cap_bytes: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            distribution: DegreeDistribution::Uniform,
            memory_cap_bytes: 4 << 30,
        }
    }
}

const ROW_BLOCK: usize = 1 << 14;

pub fn synth_graph(stats: &GraphStats, seed: u64) -> Result<CsrGraph> {
    synth_graph_with(stats, seed, &SynthOptions::default())
}

/// Builds a simple directed graph (no self-edges, no duplicates) with exactly
/// `stats.edge_count` edges. Features are generated on demand from `seed`.
pub fn synth_graph_with(stats: &GraphStats, seed: u64, opts: &SynthOptions) -> Result<CsrGraph> {
    let n = stats.node_count;
    let m = stats.edge_count;
    if n > NodeId::MAX as usize {
        return Err(Error::Domain(format!("{n} nodes exceed the id space")));
    }
    let capacity = (n as u128) * (n.saturating_sub(1) as u128);
    if m as u128 > capacity {
        return Err(Error::Domain(format!(
            "{m} edges cannot fit a simple graph on {n} nodes (max {capacity})"
        )));
    }
    let bytes = (n + 1) * std::mem::size_of::<usize>() + m * std::mem::size_of::<NodeId>();
    if bytes > opts.memory_cap_bytes {
        return Err(Error::Domain(format!(
            "graph needs ~{bytes} bytes, above the {} byte cap",
            opts.memory_cap_bytes
        )));
    }

    let degrees = match opts.distribution {
        DegreeDistribution::Uniform => uniform_degrees(n, m, seed),
        DegreeDistribution::PowerLaw { exponent } => {
            if exponent <= 1.0 {
                return Err(Error::Domain(format!("power-law exponent {exponent} must exceed 1")));
            }
            power_law_degrees(n, m, exponent, seed)
        }
    };

    let mut rp = Vec::with_capacity(n + 1);
    rp.push(0usize);
    for &d in &degrees {
        rp.push(rp.last().unwrap() + d);
    }
    debug_assert_eq!(rp[n], m);

    let mut ci: Vec<NodeId> = vec![0; m];
    let mut blocks = Vec::new();
    let mut rest: &mut [NodeId] = &mut ci;
    let mut start = 0;
    while start < n {
        let end = (start + ROW_BLOCK).min(n);
        let (head, tail) = rest.split_at_mut(rp[end] - rp[start]);
        blocks.push((start, end, head));
        rest = tail;
        start = end;
    }
    let row_seed = mix_seed(seed, 0x5EED_C0DE);
    blocks.into_par_iter().for_each(|(start, end, out)| {
        let base = rp[start];
        for row in start..end {
            let slot = &mut out[rp[row] - base..rp[row + 1] - base];
            fill_row(slot, row, n, row_seed);
        }
    });

    Ok(CsrGraph::from_parts(
        rp,
        ci,
        Features::Seeded { seed, feature_len: stats.feature_len },
    ))
}

fn fill_row(slot: &mut [NodeId], row: usize, n: usize, seed: u64) {
    if slot.is_empty() {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, row as u64));
    let picked = rand::seq::index::sample(&mut rng, n - 1, slot.len());
    for (dst, p) in slot.iter_mut().zip(picked.iter()) {
        *dst = if p >= row { p + 1 } else { p } as NodeId;
    }
    slot.sort_unstable();
}

fn uniform_degrees(n: usize, m: usize, seed: u64) -> Vec<usize> {
    let mut deg = vec![0usize; n];
    if m == 0 {
        return deg;
    }
    let cap = n - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xDE6));
    let mut placed = 0;
    while placed < m {
        let i = rng.random_range(0..n);
        if deg[i] < cap {
            deg[i] += 1;
            placed += 1;
        }
    }
    deg
}

fn power_law_degrees(n: usize, m: usize, exponent: f64, seed: u64) -> Vec<usize> {
    let mut deg = vec![0usize; n];
    if m == 0 {
        return deg;
    }
    let cap = n - 1;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x9A1)));
    let alpha = 1.0 / (exponent - 1.0);
    let weights: Vec<f64> = (0..n).map(|r| (r as f64 + 1.0).powf(-alpha)).collect();

    // Water-filling: give each uncapped node its weight share of the edges
    // still to place; nodes that hit the cap drop out of later rounds.
    let mut remaining = m;
    let mut open: Vec<usize> = (0..n).collect();
    while remaining > 0 {
        let total: f64 = open.iter().map(|&r| weights[r]).sum();
        let mut shares: Vec<(usize, f64)> = open
            .iter()
            .map(|&r| (r, remaining as f64 * weights[r] / total))
            .collect();
        let mut assigned = 0;
        for (r, share) in &shares {
            let room = cap - deg[*r];
            let take = (share.floor() as usize).min(room);
            deg[*r] += take;
            assigned += take;
        }
        // Largest remainders get the leftover single edges.
        shares.sort_by(|a, b| {
            let fa = a.1 - a.1.floor();
            let fb = b.1 - b.1.floor();
            fb.total_cmp(&fa).then(a.0.cmp(&b.0))
        });
        let mut left = remaining - assigned;
        for (r, _) in &shares {
            if left == 0 {
                break;
            }
            if deg[*r] < cap {
                deg[*r] += 1;
                left -= 1;
            }
        }
        remaining = left;
        open.retain(|&r| deg[r] < cap);
    }

    let mut out = vec![0usize; n];
    for (rank, &node) in order.iter().enumerate() {
        out[node] = deg[rank];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_stats;

    #[test]
    fn hundred_nodes_four_hundred_edges() {
        for dist in [DegreeDistribution::Uniform, DegreeDistribution::PowerLaw { exponent: 2.5 }] {
            let opts = SynthOptions { distribution: dist, ..Default::default() };
            let g = synth_graph_with(&GraphStats::new(100, 400, 8), 3, &opts).unwrap();
            g.validate().unwrap();
            let s = graph_stats(&g);
            assert!((396..=404).contains(&s.edge_count));
            assert_eq!(s.node_count, 100);
            assert_eq!(s.feature_len, 8);
            for i in 0..100 {
                let row = g.neighbors(i);
                assert!(row.windows(2).all(|w| w[0] < w[1]), "duplicates in row {i}");
                assert!(!row.contains(&(i as NodeId)));
            }
        }
    }

    #[test]
    fn trivial_graph() {
        let g = synth_graph(&GraphStats::new(1, 0, 4), 0).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn infeasible_edge_count() {
        assert!(matches!(
            synth_graph(&GraphStats::new(3, 7, 1), 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn complete_graph_is_reachable() {
        let opts = SynthOptions {
            distribution: DegreeDistribution::PowerLaw { exponent: 2.1 },
            ..Default::default()
        };
        let g = synth_graph_with(&GraphStats::new(6, 30, 1), 1, &opts).unwrap();
        assert!((0..6).all(|i| g.degree(i) == 5));
    }

    #[test]
    fn memory_cap_enforced() {
        let opts = SynthOptions { memory_cap_bytes: 1024, ..Default::default() };
        assert!(synth_graph_with(&GraphStats::new(1000, 5000, 1), 0, &opts).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let s = GraphStats::new(500, 3000, 2);
        assert_eq!(synth_graph(&s, 9).unwrap(), synth_graph(&s, 9).unwrap());
        assert_ne!(synth_graph(&s, 9).unwrap(), synth_graph(&s, 10).unwrap());
    }
}
