//! Graph ingestion, CSR storage, sampling and statistics.

mod csr;
mod edge_list;
mod features;
mod sample;
mod stats;
mod synth;

pub use csr::{build_csr, CsrArrays, CsrGraph, EdgeWeights, FeatureSource};
pub use edge_list::{load_edge_list, load_labeled_edge_list, Edge, EdgeList, LabelMap, NodeId};
pub use features::{mix_seed, read_f32_matrix, write_f32_matrix, F32Matrix, Features};
pub use sample::{neighbor_sample, sample_positions};
pub use stats::{builtin_dataset, graph_stats, BuiltinDataset, GraphStats, BUILTIN_DATASETS};
pub use synth::{synth_graph, synth_graph_with, DegreeDistribution, SynthOptions};
