//! Resistive CAM banks: exact-match search over column indices and
//! magnitude compare over row pointers.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CamKind {
    Search,
    Scan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CamBank {
    kind: CamKind,
    contents: Vec<u64>,
    width_bits: u32,
    rows: usize,
}

impl CamBank {
    pub fn new(kind: CamKind, contents: Vec<u64>, width_bits: u32, rows: usize) -> Result<Self> {
        if width_bits == 0 || width_bits > 64 {
            return Err(Error::Domain(format!("CAM width {width_bits} bits unsupported")));
        }
        if contents.len() > rows {
            return Err(Error::Shape(format!(
                "{} entries do not fit a {rows}-row CAM",
                contents.len()
            )));
        }
        if let Some(v) = contents.iter().find(|&&v| !fits(v, width_bits)) {
            return Err(Error::Domain(format!("entry {v} wider than {width_bits} bits")));
        }
        Ok(Self { kind, contents, width_bits, rows })
    }

    pub fn search(contents: Vec<u64>, width_bits: u32, rows: usize) -> Result<Self> {
        Self::new(CamKind::Search, contents, width_bits, rows)
    }

    pub fn scan(contents: Vec<u64>, width_bits: u32, rows: usize) -> Result<Self> {
        Self::new(CamKind::Scan, contents, width_bits, rows)
    }

    pub fn kind(&self) -> CamKind {
        self.kind
    }

    pub fn contents(&self) -> &[u64] {
        &self.contents
    }

    pub fn width_bits(&self) -> u32 {
        self.width_bits
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
}

fn fits(v: u64, width: u32) -> bool {
    width == 64 || v >> width == 0
}

/// Match-line outputs, one per occupied row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchLines(pub Vec<bool>);

impl MatchLines {
    pub fn matches(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&m| m).count()
    }
}

impl fmt::Display for MatchLines {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &m in &self.0 {
            f.write_str(if m { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Per-bit XNOR of the stored word against the search key, AND-reduced
/// along the match line.
fn xnor_match(stored: u64, key: u64, width: u32) -> bool {
    (0..width).all(|b| ((stored >> b) & 1) == ((key >> b) & 1))
}

/// `stored <= key`, resolved bit by bit from the MSB like a ripple comparator.
fn compare_le(stored: u64, key: u64, width: u32) -> bool {
    for b in (0..width).rev() {
        let s = (stored >> b) & 1;
        let k = (key >> b) & 1;
        if s != k {
            return s < k;
        }
    }
    true
}

pub fn cam_search(bank: &CamBank, key: u64) -> Result<MatchLines> {
    if bank.kind != CamKind::Search {
        return Err(Error::Domain("cam_search needs a search bank".into()));
    }
    if !fits(key, bank.width_bits) {
        return Err(Error::Domain(format!("key {key} wider than {} bits", bank.width_bits)));
    }
    Ok(MatchLines(
        bank.contents
            .iter()
            .map(|&v| xnor_match(v, key, bank.width_bits))
            .collect(),
    ))
}

/// Compare lines: row `i` fires when `contents[i] <= position`.
pub fn cam_compare(bank: &CamBank, position: u64) -> Result<MatchLines> {
    if bank.kind != CamKind::Scan {
        return Err(Error::Domain("cam_compare needs a scan bank".into()));
    }
    if !fits(position, bank.width_bits) {
        return Err(Error::Domain(format!("position {position} wider than {} bits", bank.width_bits)));
    }
    Ok(MatchLines(
        bank.contents
            .iter()
            .map(|&v| compare_le(v, position, bank.width_bits))
            .collect(),
    ))
}

/// Returns the row `i` with `RP[i] <= position < RP[i+1]` for a bank
/// holding a whole row-pointer array.
pub fn cam_scan(bank: &CamBank, position: u64) -> Result<NodeId> {
    let last = *bank
        .contents
        .last()
        .ok_or_else(|| Error::Range("scan bank is empty".into()))?;
    if position >= last {
        return Err(Error::Range(format!("edge position {position} >= edge count {last}")));
    }
    let lines = cam_compare(bank, position)?;
    // RP is nondecreasing, so the firing rows form a prefix; the last one
    // is the owning row.
    Ok((lines.count() - 1) as NodeId)
}
