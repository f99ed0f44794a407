use std::borrow::Cow;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::edge_list::{Edge, EdgeList, NodeId};
use super::features::{F32Matrix, Features};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum EdgeWeights {
    /// Every edge has weight 1; nothing stored.
    Unit,
    Explicit(Vec<f32>),
}

/// Where node features come from when building a graph.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureSource {
    Matrix(F32Matrix),
    Seed { seed: u64, feature_len: usize },
}

impl FeatureSource {
    pub fn none() -> Self {
        FeatureSource::Seed { seed: 0, feature_len: 0 }
    }
}

/// Compressed sparse row graph. Row `i` holds the out-edges of node `i`
/// with column indices sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrGraph {
    rp: Vec<usize>,
    ci: Vec<NodeId>,
    weights: EdgeWeights,
    features: Features,
}

/// Raw CSR arrays, e.g. for fixtures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsrArrays {
    pub rp: Vec<usize>,
    pub ci: Vec<NodeId>,
    /// Empty means unit weights.
    #[serde(default)]
    pub e: Vec<f32>,
}

pub fn build_csr(el: &EdgeList, features: FeatureSource) -> Result<CsrGraph> {
    let n = el.node_count;
    let features = match features {
        FeatureSource::Matrix(m) => {
            if m.rows != n {
                return Err(Error::Shape(format!(
                    "feature matrix has {} rows for {n} nodes",
                    m.rows
                )));
            }
            Features::Dense { data: m.data, feature_len: m.cols }
        }
        FeatureSource::Seed { seed, feature_len } => Features::Seeded { seed, feature_len },
    };

    let mut rp = vec![0usize; n + 1];
    for e in &el.edges {
        if e.src as usize >= n || e.dst as usize >= n {
            return Err(Error::Domain(format!("edge ({}, {}) out of range", e.src, e.dst)));
        }
        rp[e.src as usize + 1] += 1;
    }
    for i in 0..n {
        rp[i + 1] += rp[i];
    }
    let mut cursor = rp.clone();
    let mut slots: Vec<(NodeId, f32)> = vec![(0, 0.0); el.edges.len()];
    for e in &el.edges {
        let at = &mut cursor[e.src as usize];
        slots[*at] = (e.dst, e.weight);
        *at += 1;
    }
    for i in 0..n {
        slots[rp[i]..rp[i + 1]].sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }
    let ci = slots.iter().map(|s| s.0).collect();
    let weights = if slots.iter().all(|s| s.1 == 1.0) {
        EdgeWeights::Unit
    } else {
        EdgeWeights::Explicit(slots.iter().map(|s| s.1).collect())
    };
    Ok(CsrGraph { rp, ci, weights, features })
}

impl CsrGraph {
    /// Builds from raw arrays, validating every CSR invariant.
    pub fn from_arrays(arrays: CsrArrays, features: Features) -> Result<Self> {
        let g = Self::from_arrays_unchecked(arrays, features);
        g.validate()?;
        Ok(g)
    }

    /// Builds from raw arrays without validation. Used to load fixtures
    /// that are then checked with [`CsrGraph::validate`].
    pub fn from_arrays_unchecked(arrays: CsrArrays, features: Features) -> Self {
        let weights = if arrays.e.is_empty() || (arrays.e.iter().all(|&w| w == 1.0) && arrays.e.len() == arrays.ci.len()) {
            EdgeWeights::Unit
        } else {
            EdgeWeights::Explicit(arrays.e)
        };
        Self { rp: arrays.rp, ci: arrays.ci, weights, features }
    }

    pub(crate) fn from_parts(rp: Vec<usize>, ci: Vec<NodeId>, features: Features) -> Self {
        Self { rp, ci, weights: EdgeWeights::Unit, features }
    }

    pub fn validate(&self) -> Result<()> {
        let rp = &self.rp;
        if rp.is_empty() || rp[0] != 0 {
            return Err(Error::Invariant("rp must start with 0".into()));
        }
        if let Some(i) = rp.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Invariant(format!(
                "rp not monotone at row {i}: {} > {}",
                rp[i],
                rp[i + 1]
            )));
        }
        if *rp.last().unwrap() != self.ci.len() {
            return Err(Error::Invariant(format!(
                "rp terminal {} != edge count {}",
                rp.last().unwrap(),
                self.ci.len()
            )));
        }
        if let EdgeWeights::Explicit(e) = &self.weights {
            if e.len() != self.ci.len() {
                return Err(Error::Invariant(format!(
                    "edge weight array has {} entries for {} edges",
                    e.len(),
                    self.ci.len()
                )));
            }
        }
        let n = self.node_count();
        for i in 0..n {
            let row = &self.ci[rp[i]..rp[i + 1]];
            if let Some(&c) = row.iter().find(|&&c| c as usize >= n) {
                return Err(Error::Invariant(format!("row {i}: column {c} out of range")));
            }
            if row.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Invariant(format!("row {i}: columns not sorted")));
            }
        }
        if let Features::Dense { data, feature_len } = &self.features {
            if data.len() != n * feature_len {
                return Err(Error::Invariant("feature matrix shape mismatch".into()));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.rp.len().saturating_sub(1)
    }

    pub fn edge_count(&self) -> usize {
        self.ci.len()
    }

    pub fn feature_len(&self) -> usize {
        self.features.feature_len()
    }

    pub fn rp(&self) -> &[usize] {
        &self.rp
    }

    pub fn ci(&self) -> &[NodeId] {
        &self.ci
    }

    /// Edge weight array, materialized if stored implicitly.
    pub fn e(&self) -> Cow<'_, [f32]> {
        match &self.weights {
            EdgeWeights::Unit => Cow::Owned(vec![1.0; self.ci.len()]),
            EdgeWeights::Explicit(e) => Cow::Borrowed(e),
        }
    }

    pub fn edge_weight(&self, pos: usize) -> f32 {
        match &self.weights {
            EdgeWeights::Unit => 1.0,
            EdgeWeights::Explicit(e) => e[pos],
        }
    }

    pub fn features(&self) -> &Features {
        &self.features
    }

    pub fn feature_row(&self, node: usize) -> Cow<'_, [f32]> {
        self.features.row(node)
    }

    pub fn row_range(&self, node: usize) -> Range<usize> {
        self.rp[node]..self.rp[node + 1]
    }

    pub fn neighbors(&self, node: usize) -> &[NodeId] {
        &self.ci[self.row_range(node)]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.rp[node + 1] - self.rp[node]
    }

    /// Expands back into an edge list, in CSR order.
    pub fn expand(&self) -> EdgeList {
        let mut edges = Vec::with_capacity(self.edge_count());
        for src in 0..self.node_count() {
            for pos in self.row_range(src) {
                edges.push(Edge::weighted(src as NodeId, self.ci[pos], self.edge_weight(pos)));
            }
        }
        EdgeList { edges, node_count: self.node_count() }
    }

    pub fn arrays(&self) -> CsrArrays {
        CsrArrays { rp: self.rp.clone(), ci: self.ci.clone(), e: self.e().into_owned() }
    }

    /// Approximate heap footprint in bytes.
    pub fn stored_bytes(&self) -> usize {
        let w = match &self.weights {
            EdgeWeights::Unit => 0,
            EdgeWeights::Explicit(e) => e.len() * 4,
        };
        self.rp.len() * std::mem::size_of::<usize>() + self.ci.len() * 4 + w + self.features.stored_bytes()
    }
}
