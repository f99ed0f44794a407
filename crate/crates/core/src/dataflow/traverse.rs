//! Destination-stationary traversal: search CAMs hold CI, scan CAMs hold RP.
//! A destination id is searched across all CI banks; every matching edge
//! position is then compared against RP to recover its source row.

use serde::{Deserialize, Serialize};

use crate::arch::Crossbar;
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId};

use super::cam::{cam_compare, cam_search, CamBank};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraversalOps {
    /// One per CI bank searched.
    pub search_ops: u64,
    /// One per RP bank compared, per matching edge.
    pub scan_ops: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Traversal {
    /// `(source, edge weight)` of every in-edge, in edge-position order.
    pub sources: Vec<(NodeId, f32)>,
    pub ops: TraversalOps,
}

/// A graph programmed into the traversal core's CAM banks.
#[derive(Clone, Debug)]
pub struct LoadedCams {
    search: Vec<CamBank>,
    scan: Vec<CamBank>,
    rows: usize,
    edge_count: u64,
}

impl LoadedCams {
    pub fn load(g: &CsrGraph, xbar: &Crossbar) -> Result<Self> {
        let width = u32::try_from(xbar.cols).unwrap_or(64).min(64);
        let search = g
            .ci()
            .chunks(xbar.rows)
            .map(|c| CamBank::search(c.iter().map(|&v| v as u64).collect(), width, xbar.rows))
            .collect::<Result<Vec<_>>>()?;
        let scan = g
            .rp()
            .chunks(xbar.rows)
            .map(|c| CamBank::scan(c.iter().map(|&v| v as u64).collect(), width, xbar.rows))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { search, scan, rows: xbar.rows, edge_count: g.edge_count() as u64 })
    }

    pub fn search_banks(&self) -> usize {
        self.search.len()
    }

    pub fn scan_banks(&self) -> usize {
        self.scan.len()
    }

    /// Source row owning edge `position`.
    pub fn scan(&self, position: u64) -> Result<NodeId> {
        if position >= self.edge_count {
            return Err(Error::Range(format!(
                "edge position {position} >= edge count {}",
                self.edge_count
            )));
        }
        let mut fired = 0usize;
        for bank in &self.scan {
            fired += cam_compare(bank, position)?.count();
        }
        Ok((fired - 1) as NodeId)
    }

    pub fn traverse(&self, g: &CsrGraph, dst: usize) -> Result<Traversal> {
        if dst >= g.node_count() {
            return Err(Error::Range(format!("node {dst} out of range")));
        }
        let mut ops = TraversalOps::default();
        let mut sources = Vec::new();
        for (b, bank) in self.search.iter().enumerate() {
            ops.search_ops += 1;
            let lines = cam_search(bank, dst as u64)?;
            for row in lines.matches() {
                let pos = b * self.rows + row;
                ops.scan_ops += self.scan.len() as u64;
                sources.push((self.scan(pos as u64)?, g.edge_weight(pos)));
            }
        }
        Ok(Traversal { sources, ops })
    }
}

/// In-edges of `dst` on a single-crossbar 512×32 traversal core.
pub fn traverse(g: &CsrGraph, dst: usize) -> Result<Traversal> {
    traverse_on(g, dst, &Crossbar::new(1, 512, 32))
}

pub fn traverse_on(g: &CsrGraph, dst: usize, xbar: &Crossbar) -> Result<Traversal> {
    LoadedCams::load(g, xbar)?.traverse(g, dst)
}
