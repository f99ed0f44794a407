//! Value-level emulation of the traversal → aggregation → extraction
//! pipeline, with operation counts for the cost model.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arch::CoreConfig;
use crate::error::{Error, Result};
use crate::graph::{build_csr, sample_positions, CsrGraph, Edge, EdgeList, FeatureSource};

use super::matrix::Matrix;
use super::model::{Activation, GnnModel};
use super::mvm::tiled_mvm;
use super::quant::QuantSpec;
use super::traverse::LoadedCams;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMode {
    Sum,
    /// Neighbors scaled by their edge weight; the node itself by 1.
    #[default]
    WeightedSum,
    Mean,
}

/// Operation counts per core. Integer fields only, so per-node traces can
/// be summed in any order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadTrace {
    pub nodes: u64,
    pub search_ops: u64,
    pub scan_ops: u64,
    pub agg_tiles: u64,
    pub fx_tiles: u64,
    /// Feature words staged through the buffer array.
    pub buffer_words: u64,
}

impl WorkloadTrace {
    pub fn scaled(&self, k: u64) -> Self {
        Self {
            nodes: self.nodes * k,
            search_ops: self.search_ops * k,
            scan_ops: self.scan_ops * k,
            agg_tiles: self.agg_tiles * k,
            fx_tiles: self.fx_tiles * k,
            buffer_words: self.buffer_words * k,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

impl Add for WorkloadTrace {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            nodes: self.nodes + o.nodes,
            search_ops: self.search_ops + o.search_ops,
            scan_ops: self.scan_ops + o.scan_ops,
            agg_tiles: self.agg_tiles + o.agg_tiles,
            fx_tiles: self.fx_tiles + o.fx_tiles,
            buffer_words: self.buffer_words + o.buffer_words,
        }
    }
}

impl AddAssign for WorkloadTrace {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sum for WorkloadTrace {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregationResult {
    pub z: Vec<f64>,
    pub op_counts: WorkloadTrace,
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionResult {
    pub output: Vec<f64>,
    pub tiles: u64,
    pub saturated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Inference {
    /// One row per node.
    pub outputs: Matrix,
    pub trace: WorkloadTrace,
    pub saturated: bool,
}

/// Emulator bound to a core geometry and quantization scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Emulator {
    pub cores: CoreConfig,
    pub quant: QuantSpec,
    pub mode: AggregationMode,
    pub include_self: bool,
}

impl Emulator {
    pub fn new(cores: CoreConfig, quant: QuantSpec) -> Self {
        Self { cores, quant, mode: AggregationMode::default(), include_self: true }
    }

    pub fn with_mode(self, mode: AggregationMode) -> Self {
        Self { mode, ..self }
    }

    pub fn load(&self, g: &CsrGraph) -> Result<LoadedCams> {
        LoadedCams::load(g, &self.cores.traversal)
    }

    /// Combines `dst`'s own features with those of its (optionally sampled)
    /// in-neighbors on the aggregation crossbars.
    pub fn aggregate(
        &self,
        g: &CsrGraph,
        cams: &LoadedCams,
        dst: usize,
        sample: Option<(usize, u64)>,
    ) -> Result<AggregationResult> {
        let t = cams.traverse(g, dst)?;
        let mut trace = WorkloadTrace {
            nodes: 1,
            search_ops: t.ops.search_ops,
            scan_ops: t.ops.scan_ops,
            ..Default::default()
        };
        let chosen: Vec<(u32, f32)> = match sample {
            Some((k, seed)) => sample_positions(t.sources.len(), k, seed, dst as u64)
                .into_iter()
                .map(|p| t.sources[p])
                .collect(),
            None => t.sources,
        };

        let f = g.feature_len();
        let mut rows: Vec<(usize, f64)> = Vec::with_capacity(chosen.len() + 1);
        if self.include_self {
            rows.push((dst, 1.0));
        }
        for &(src, w) in &chosen {
            let coeff = match self.mode {
                AggregationMode::WeightedSum => f64::from(w),
                AggregationMode::Sum | AggregationMode::Mean => 1.0,
            };
            rows.push((src as usize, coeff));
        }
        if rows.is_empty() || f == 0 {
            return Ok(AggregationResult { z: vec![0.0; f], op_counts: trace, saturated: false });
        }
        if self.mode == AggregationMode::Mean {
            let inv = 1.0 / rows.len() as f64;
            rows.iter_mut().for_each(|r| r.1 = inv);
        }

        let mut block = Matrix::zeros(rows.len(), f);
        for (r, &(node, _)) in rows.iter().enumerate() {
            for (c, &v) in g.feature_row(node).iter().enumerate() {
                block.set(r, c, f64::from(v));
            }
        }
        let coeffs: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let out = tiled_mvm(&self.cores.aggregation, &block, &coeffs, &self.quant)?;
        trace.agg_tiles = out.tiles;
        trace.buffer_words = (rows.len() * f) as u64;
        Ok(AggregationResult { z: out.values, op_counts: trace, saturated: out.saturated })
    }

    pub fn feature_extract(&self, z: &[f64], m: &GnnModel) -> Result<ExtractionResult> {
        if z.len() != m.widths()[0] {
            return Err(Error::Shape(format!(
                "aggregated vector has {} features, model expects {}",
                z.len(),
                m.widths()[0]
            )));
        }
        let mut h = z.to_vec();
        let mut tiles = 0;
        let mut saturated = false;
        for w in m.weights() {
            let out = tiled_mvm(&self.cores.extraction, w, &h, &self.quant)?;
            tiles += out.tiles;
            saturated |= out.saturated;
            h = out.values;
            h.iter_mut().for_each(|v| *v = m.activation().apply(*v));
        }
        Ok(ExtractionResult { output: h, tiles, saturated })
    }

    /// Full inference over every node; deterministic for a given seed and
    /// independent of the worker count.
    pub fn run_inference(
        &self,
        g: &CsrGraph,
        m: &GnnModel,
        sample_k: Option<usize>,
        seed: u64,
    ) -> Result<Inference> {
        let out_len = *m.widths().last().unwrap();
        if g.node_count() == 0 {
            return Ok(Inference {
                outputs: Matrix::zeros(0, out_len),
                trace: WorkloadTrace::default(),
                saturated: false,
            });
        }
        if g.feature_len() != m.widths()[0] {
            return Err(Error::Shape(format!(
                "graph has {} features, model expects {}",
                g.feature_len(),
                m.widths()[0]
            )));
        }
        let cams = self.load(g)?;
        let per_node = (0..g.node_count())
            .into_par_iter()
            .map(|dst| {
                let agg = self.aggregate(g, &cams, dst, sample_k.map(|k| (k, seed)))?;
                let fx = self.feature_extract(&agg.z, m)?;
                let mut trace = agg.op_counts;
                trace.fx_tiles = fx.tiles;
                Ok((fx.output, trace, agg.saturated || fx.saturated))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut outputs = Matrix::zeros(g.node_count(), out_len);
        let mut trace = WorkloadTrace::default();
        let mut saturated = false;
        for (i, (row, t, s)) in per_node.into_iter().enumerate() {
            outputs.data[i * out_len..(i + 1) * out_len].copy_from_slice(&row);
            trace += t;
            saturated |= s;
        }
        Ok(Inference { outputs, trace, saturated })
    }

    /// Trace of one device serving a node with `cluster_size` in-neighbors
    /// and `feature_len` features through an MLP of the given widths.
    pub fn cluster_trace(&self, cluster_size: usize, feature_len: usize, hidden: &[usize]) -> Result<WorkloadTrace> {
        let edges = (1..=cluster_size as u32).map(|s| Edge::new(s, 0)).collect();
        let el = EdgeList::new(cluster_size + 1, edges)?;
        let g = build_csr(&el, FeatureSource::Seed { seed: 1, feature_len })?;
        let mut widths = vec![feature_len];
        widths.extend_from_slice(hidden);
        let model = GnnModel::random(&widths, Activation::Relu, 1)?;
        let float = Emulator { quant: QuantSpec { float_mode: true, ..self.quant }, ..*self };
        let cams = float.load(&g)?;
        let agg = float.aggregate(&g, &cams, 0, None)?;
        let fx = float.feature_extract(&agg.z, &model)?;
        Ok(WorkloadTrace { fx_tiles: fx.tiles, ..agg.op_counts })
    }
}

impl Default for Emulator {
    fn default() -> Self {
        Self::new(CoreConfig::decentralized(), QuantSpec::default())
    }
}

/// Aggregates one node on a single-device geometry.
pub fn aggregate(g: &CsrGraph, dst: usize, q: &QuantSpec, mode: AggregationMode) -> Result<AggregationResult> {
    let emu = Emulator::new(CoreConfig::decentralized(), *q).with_mode(mode);
    let cams = emu.load(g)?;
    emu.aggregate(g, &cams, dst, None)
}

pub fn feature_extract(z: &[f64], m: &GnnModel, q: &QuantSpec) -> Result<Vec<f64>> {
    Ok(Emulator::new(CoreConfig::decentralized(), *q).feature_extract(z, m)?.output)
}

pub fn run_inference(
    g: &CsrGraph,
    m: &GnnModel,
    q: &QuantSpec,
    sample_k: Option<usize>,
    seed: u64,
) -> Result<Inference> {
    Emulator::new(CoreConfig::decentralized(), *q).run_inference(g, m, sample_k, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::F32Matrix;

    fn fig1_graph() -> CsrGraph {
        let el = EdgeList::from_pairs(&[(2, 3), (4, 3), (7, 3), (8, 3), (9, 3), (3, 1), (0, 5)]);
        let data = (0..10).map(|n| (n + 1) as f32).collect();
        build_csr(&el, FeatureSource::Matrix(F32Matrix { rows: 10, cols: 1, data })).unwrap()
    }

    #[test]
    fn node_three_sums_neighbors_and_itself() {
        let g = fig1_graph();
        let r = aggregate(&g, 3, &QuantSpec::float(), AggregationMode::Sum).unwrap();
        // f(n) = n + 1: f2+f4+f7+f8+f9+f3.
        assert_eq!(r.z, vec![(3 + 5 + 8 + 9 + 10 + 4) as f64]);
        assert_eq!(r.op_counts.scan_ops, 5);
        assert_eq!(r.op_counts.agg_tiles, 1);
        assert_eq!(r.op_counts.buffer_words, 6);
    }

    #[test]
    fn isolated_node_keeps_own_features() {
        let g = fig1_graph();
        let r = aggregate(&g, 6, &QuantSpec::float(), AggregationMode::WeightedSum).unwrap();
        assert_eq!(r.z, vec![7.0]);
        let r = aggregate(&g, 6, &QuantSpec::float(), AggregationMode::Mean).unwrap();
        assert_eq!(r.z, vec![7.0]);
    }

    #[test]
    fn identity_model_passes_through() {
        let m = GnnModel::new(vec![Matrix::identity(3)], Activation::Identity).unwrap();
        let z = vec![1.0, -2.0, 3.0];
        assert_eq!(feature_extract(&z, &m, &QuantSpec::float()).unwrap(), z);
    }

    #[test]
    fn relu_zeroes_negative_preactivations() {
        let m = GnnModel::new(vec![Matrix::identity(3)], Activation::Relu).unwrap();
        assert_eq!(
            feature_extract(&[1.0, -2.0, 3.0], &m, &QuantSpec::float()).unwrap(),
            vec![1.0, 0.0, 3.0]
        );
    }

    #[test]
    fn width_mismatch_is_shape_error() {
        let m = GnnModel::random(&[4, 2], Activation::Relu, 0).unwrap();
        assert!(matches!(feature_extract(&[1.0; 3], &m, &QuantSpec::float()), Err(Error::Shape(_))));
    }

    #[test]
    fn empty_graph_inference() {
        let g = build_csr(&EdgeList::default(), FeatureSource::Seed { seed: 0, feature_len: 4 }).unwrap();
        let m = GnnModel::random(&[4, 2], Activation::Relu, 0).unwrap();
        let inf = run_inference(&g, &m, &QuantSpec::float(), None, 0).unwrap();
        assert_eq!(inf.outputs.rows, 0);
        assert!(inf.trace.is_empty());
    }

    #[test]
    fn sampling_limits_aggregated_rows() {
        let el = EdgeList::from_pairs(&[(1, 0), (2, 0), (3, 0), (4, 0), (5, 0)]);
        let g = build_csr(&el, FeatureSource::Seed { seed: 3, feature_len: 2 }).unwrap();
        let emu = Emulator::new(CoreConfig::decentralized(), QuantSpec::float());
        let cams = emu.load(&g).unwrap();
        let r = emu.aggregate(&g, &cams, 0, Some((2, 11))).unwrap();
        assert_eq!(r.op_counts.buffer_words, 3 * 2);
        assert_eq!(r.op_counts.scan_ops, 5);
    }

    #[test]
    fn cluster_trace_counts() {
        // 10 neighbors, 512 features, 512→128→64 with 4 columns per weight.
        let t = Emulator::default().cluster_trace(10, 512, &[128, 64]).unwrap();
        assert_eq!(t.search_ops, 1);
        assert_eq!(t.scan_ops, 10);
        assert_eq!(t.agg_tiles, 4);
        assert_eq!(t.fx_tiles, 4 * 4 + 2);
        assert_eq!(t.buffer_words, 11 * 512);
    }
}
