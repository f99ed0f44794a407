//! Plain-text edge lists and label remapping.
//!
//! Format: one `src dst [weight]` triple per line. Blank lines and lines
//! starting with `#` are ignored, except for an optional `# nodes <count>`
//! header that fixes the node count.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f32,
}

impl Edge {
    pub fn new(src: NodeId, dst: NodeId) -> Self {
        Self { src, dst, weight: 1.0 }
    }

    pub fn weighted(src: NodeId, dst: NodeId, weight: f32) -> Self {
        Self { src, dst, weight }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeList {
    pub edges: Vec<Edge>,
    pub node_count: usize,
}

impl EdgeList {
    pub fn new(node_count: usize, edges: Vec<Edge>) -> Result<Self> {
        if node_count > NodeId::MAX as usize {
            return Err(Error::Domain(format!("node count {node_count} exceeds id space")));
        }
        if let Some(e) = edges
            .iter()
            .find(|e| e.src as usize >= node_count || e.dst as usize >= node_count)
        {
            return Err(Error::Domain(format!(
                "edge ({}, {}) references a node outside [0, {node_count})",
                e.src, e.dst
            )));
        }
        Ok(Self { edges, node_count })
    }

    /// Unit-weight edges; node count is one past the largest id.
    pub fn from_pairs(pairs: &[(NodeId, NodeId)]) -> Self {
        let node_count = pairs
            .iter()
            .map(|&(s, d)| s.max(d) as usize + 1)
            .max()
            .unwrap_or(0);
        Self {
            edges: pairs.iter().map(|&(s, d)| Edge::new(s, d)).collect(),
            node_count,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Adds the reverse of every edge whose reverse is not already present.
    /// Self-edges are kept once.
    pub fn symmetrized(&self) -> Self {
        let present: HashSet<(NodeId, NodeId)> =
            self.edges.iter().map(|e| (e.src, e.dst)).collect();
        let mut added = HashSet::new();
        let mut edges = self.edges.clone();
        for e in &self.edges {
            let rev = (e.dst, e.src);
            if e.src != e.dst && !present.contains(&rev) && added.insert(rev) {
                edges.push(Edge::weighted(e.dst, e.src, e.weight));
            }
        }
        Self { edges, node_count: self.node_count }
    }
}

fn parse_header(line: &str) -> Option<&str> {
    let rest = line.trim_start_matches('#').trim();
    rest.strip_prefix("nodes")
        .map(|r| r.trim_start_matches(':').trim())
}

/// Parses an edge list from a text stream.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<EdgeList> {
    let mut edges = Vec::new();
    let mut declared: Option<usize> = None;
    let mut max_id: Option<u64> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            if let Some(count) = parse_header(trimmed) {
                let n = count
                    .parse::<usize>()
                    .map_err(|_| Error::parse(lineno, format!("bad node-count header {count:?}")))?;
                declared = Some(n);
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(src), Some(dst)) = (fields.next(), fields.next()) else {
            return Err(Error::parse(lineno, "expected `src dst [weight]`"));
        };
        let src = parse_id(src, lineno)?;
        let dst = parse_id(dst, lineno)?;
        let weight = match fields.next() {
            Some(w) => w
                .parse::<f32>()
                .map_err(|_| Error::parse(lineno, format!("bad weight {w:?}")))?,
            None => 1.0,
        };
        if fields.next().is_some() {
            return Err(Error::parse(lineno, "trailing fields after weight"));
        }
        max_id = Some(max_id.map_or(src.max(dst), |m| m.max(src).max(dst)));
        edges.push(Edge::weighted(src as NodeId, dst as NodeId, weight));
    }

    let seen = max_id.map_or(0, |m| m as usize + 1);
    let node_count = match declared {
        Some(n) if n < seen => {
            return Err(Error::Domain(format!(
                "header declares {n} nodes but id {} appears",
                seen - 1
            )))
        }
        Some(n) => n,
        None => seen,
    };
    EdgeList::new(node_count, edges)
}

fn parse_id(tok: &str, lineno: usize) -> Result<u64> {
    let v = tok
        .parse::<i64>()
        .map_err(|_| Error::parse(lineno, format!("bad node id {tok:?}")))?;
    if v < 0 {
        return Err(Error::Domain(format!("line {lineno}: negative node id {v}")));
    }
    if v as u64 >= NodeId::MAX as u64 {
        return Err(Error::Domain(format!("line {lineno}: node id {v} exceeds id space")));
    }
    Ok(v as u64)
}

/// Dense relabeling of arbitrary node labels, in first-seen order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabelMap {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl LabelMap {
    pub fn id_of(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as NodeId;
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Writes the `orig_label new_id` sidecar.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (id, label) in self.labels.iter().enumerate() {
            writeln!(w, "{label} {id}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut map = LabelMap::default();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut f = trimmed.split_whitespace();
            let (Some(label), Some(id), None) = (f.next(), f.next(), f.next()) else {
                return Err(Error::parse(idx + 1, "expected `orig_label new_id`"));
            };
            let id: usize = id
                .parse()
                .map_err(|_| Error::parse(idx + 1, format!("bad id {id:?}")))?;
            if id != map.labels.len() {
                return Err(Error::parse(idx + 1, format!("ids must be dense, expected {}", map.labels.len())));
            }
            map.id_of(label);
        }
        Ok(map)
    }
}

/// Parses an edge list whose endpoints are arbitrary whitespace-free labels.
pub fn load_labeled_edge_list<R: BufRead>(reader: R) -> Result<(EdgeList, LabelMap)> {
    let mut map = LabelMap::default();
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(src), Some(dst)) = (fields.next(), fields.next()) else {
            return Err(Error::parse(lineno, "expected `src dst [weight]`"));
        };
        let weight = match fields.next() {
            Some(w) => w
                .parse::<f32>()
                .map_err(|_| Error::parse(lineno, format!("bad weight {w:?}")))?,
            None => 1.0,
        };
        let s = map.id_of(src);
        let d = map.id_of(dst);
        edges.push(Edge::weighted(s, d, weight));
    }
    let n = map.len();
    Ok((EdgeList::new(n, edges)?, map))
}
