//! Crossbar geometry of the three accelerator cores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bank of identical crossbars: `count` arrays of `rows × cols` cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossbar {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Crossbar {
    pub const fn new(count: usize, rows: usize, cols: usize) -> Self {
        Self { count, rows, cols }
    }

    pub fn with_count(self, count: usize) -> Self {
        Self { count, ..self }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.count == 0 || self.rows == 0 || self.cols == 0 {
            return Err(Error::Domain(format!(
                "{name} crossbar must have positive count and dimensions, got {}x({}x{})",
                self.count, self.rows, self.cols
            )));
        }
        Ok(())
    }
}

/// One accelerator instance: traversal (CAM), aggregation (MVM) and
/// feature-extraction (MVM) cores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreConfig {
    pub traversal: Crossbar,
    pub aggregation: Crossbar,
    pub extraction: Crossbar,
    /// Aggregation and extraction run as a two-stage pipeline.
    #[serde(default)]
    pub overlap_agg_fx: bool,
    /// Feature-buffer loads are hidden behind traversal.
    #[serde(default)]
    pub double_buffering: bool,
}

impl CoreConfig {
    /// Central edge device: 2000×(512×32), 1000×(512×512), 256×(128×128).
    ///
    /// "2K" and "1K" are read as decimal thousands; with binary 2048/1024 the
    /// scaled per-core latencies drift ~2.4% away from the reference table.
    pub const fn centralized() -> Self {
        Self {
            traversal: Crossbar::new(2000, 512, 32),
            aggregation: Crossbar::new(1000, 512, 512),
            extraction: Crossbar::new(256, 128, 128),
            overlap_agg_fx: false,
            double_buffering: false,
        }
    }

    /// Per-node device: one crossbar of each kind.
    pub const fn decentralized() -> Self {
        Self {
            traversal: Crossbar::new(1, 512, 32),
            aggregation: Crossbar::new(1, 512, 512),
            extraction: Crossbar::new(1, 128, 128),
            overlap_agg_fx: false,
            double_buffering: false,
        }
    }

    /// Same geometry with every core scaled to `count` crossbars.
    pub fn with_uniform_count(self, count: usize) -> Self {
        Self {
            traversal: self.traversal.with_count(count),
            aggregation: self.aggregation.with_count(count),
            extraction: self.extraction.with_count(count),
            ..self
        }
    }

    /// Per-core scaling factors of `self` relative to `base`.
    pub fn scaling_over(&self, base: &CoreConfig) -> [f64; 3] {
        [
            self.traversal.count as f64 / base.traversal.count as f64,
            self.aggregation.count as f64 / base.aggregation.count as f64,
            self.extraction.count as f64 / base.extraction.count as f64,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        self.traversal.validate("traversal")?;
        self.aggregation.validate("aggregation")?;
        self.extraction.validate("extraction")
    }
}

impl Default for CoreConfig {
    fn default() -> Self {
        Self::decentralized()
    }
}
