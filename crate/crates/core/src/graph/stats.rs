use serde::{Deserialize, Serialize};

use super::csr::CsrGraph;

/// Summary statistics of a workload graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub feature_len: usize,
    /// Nodes a device talks to inside its cluster. Computed as the rounded
    /// mean out-degree, or injected verbatim for published datasets.
    pub avg_cluster_size: usize,
    pub max_degree: usize,
}

impl GraphStats {
    pub fn new(node_count: usize, edge_count: usize, feature_len: usize) -> Self {
        let avg_cluster_size = if node_count == 0 {
            0
        } else {
            (edge_count as f64 / node_count as f64).round() as usize
        };
        Self { node_count, edge_count, feature_len, avg_cluster_size, max_degree: 0 }
    }

    pub fn with_cluster_size(self, cs: usize) -> Self {
        Self { avg_cluster_size: cs, ..self }
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            self.edge_count as f64 / self.node_count as f64
        }
    }
}

pub fn graph_stats(g: &CsrGraph) -> GraphStats {
    let n = g.node_count();
    let max_degree = (0..n).map(|i| g.degree(i)).max().unwrap_or(0);
    GraphStats {
        max_degree,
        ..GraphStats::new(n, g.edge_count(), g.feature_len())
    }
}

/// A published benchmark graph described only by its statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuiltinDataset {
    pub name: &'static str,
    pub stats: GraphStats,
}

const fn dataset(name: &'static str, n: usize, e: usize, f: usize, cs: usize) -> BuiltinDataset {
    BuiltinDataset {
        name,
        stats: GraphStats {
            node_count: n,
            edge_count: e,
            feature_len: f,
            avg_cluster_size: cs,
            max_degree: 0,
        },
    }
}

/// Node/edge counts, feature lengths and average cluster sizes of the four
/// benchmark graphs. Cluster sizes are the published values, not mean degree.
pub const BUILTIN_DATASETS: [BuiltinDataset; 4] = [
    dataset("livejournal", 4_847_571, 68_993_773, 1, 9),
    dataset("collab", 372_475, 24_574_995, 496, 263),
    dataset("cora", 2708, 5429, 1433, 4),
    dataset("citeseer", 3327, 4732, 3703, 2),
];

pub fn builtin_dataset(name: &str) -> Option<BuiltinDataset> {
    let lower = name.to_ascii_lowercase();
    BUILTIN_DATASETS.iter().copied().find(|d| d.name == lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_csr, EdgeList, FeatureSource};

    #[test]
    fn single_node_has_zero_cluster() {
        let el = EdgeList::new(1, vec![]).unwrap();
        let s = graph_stats(&build_csr(&el, FeatureSource::none()).unwrap());
        assert_eq!(s.avg_cluster_size, 0);
        assert_eq!(s.edge_count, 0);
    }

    #[test]
    fn complete_graph_on_five() {
        let mut pairs = vec![];
        for a in 0..5 {
            for b in 0..5 {
                if a != b {
                    pairs.push((a, b));
                }
            }
        }
        let s = graph_stats(&build_csr(&EdgeList::from_pairs(&pairs), FeatureSource::none()).unwrap());
        assert_eq!(s.avg_cluster_size, 4);
        assert_eq!(s.max_degree, 4);
        assert_eq!(s.edge_count, 20);
    }

    #[test]
    fn builtin_table_values() {
        let c = builtin_dataset("Citeseer").unwrap().stats;
        assert_eq!((c.node_count, c.edge_count, c.feature_len, c.avg_cluster_size), (3327, 4732, 3703, 2));
        let lj = builtin_dataset("livejournal").unwrap().stats;
        assert_eq!((lj.node_count, lj.edge_count, lj.feature_len, lj.avg_cluster_size), (4_847_571, 68_993_773, 1, 9));
        assert!(builtin_dataset("reddit").is_none());
    }

    #[test]
    fn citeseer_mean_degree_close_to_published_cluster_size() {
        // Symmetrized mean degree 2 * 4732 / 3327 ≈ 2.84 rounds to 3.
        let s = GraphStats::new(3327, 2 * 4732, 3703);
        assert!((s.avg_cluster_size as i64 - 2).abs() <= 1);
    }
}
