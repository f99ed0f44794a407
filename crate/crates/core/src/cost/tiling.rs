use serde::{Deserialize, Serialize};

use crate::arch::Crossbar;
use crate::dataflow::tile_grid;
use crate::error::{Error, Result};

/// Number of parallel passes needed for `ops` tile operations on `count`
/// crossbars.
pub fn waves(ops: u64, count: usize) -> u64 {
    ops.div_ceil(count.max(1) as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileGrid {
    pub rows: usize,
    pub cols: usize,
    pub row_tiles: usize,
    pub col_tiles: usize,
    /// Matrix columns held by one tile after bit-slice expansion.
    pub values_per_tile: usize,
}

impl TileGrid {
    pub fn tiles(&self) -> u64 {
        (self.row_tiles * self.col_tiles) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingPlan {
    pub layers: Vec<TileGrid>,
    pub total_tiles: u64,
    pub crossbar_count: usize,
    /// Tiles processed per wave when every crossbar is busy.
    pub tiles_per_wave: usize,
    pub waves: u64,
}

/// Tiles each `(rows, cols)` matrix onto `xbar`, with every weight taking
/// `cols_per_value` physical columns.
pub fn plan_tiling(dims: &[(usize, usize)], xbar: &Crossbar, cols_per_value: usize) -> Result<TilingPlan> {
    xbar.validate("tiling")?;
    if cols_per_value == 0 {
        return Err(Error::Domain("columns per value must be positive".into()));
    }
    let layers = dims
        .iter()
        .map(|&(rows, cols)| {
            if rows == 0 || cols == 0 {
                return Err(Error::Domain(format!("matrix {rows}x{cols} must be non-empty")));
            }
            let (row_tiles, col_tiles, values_per_tile) = tile_grid(rows, cols, xbar, cols_per_value)?;
            Ok(TileGrid { rows, cols, row_tiles, col_tiles, values_per_tile })
        })
        .collect::<Result<Vec<_>>>()?;
    let total_tiles = layers.iter().map(TileGrid::tiles).sum();
    Ok(TilingPlan {
        layers,
        total_tiles,
        crossbar_count: xbar.count,
        tiles_per_wave: xbar.count,
        waves: waves(total_tiles, xbar.count),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tile() {
        let p = plan_tiling(&[(512, 512)], &Crossbar::new(1, 512, 512), 1).unwrap();
        assert_eq!((p.total_tiles, p.waves), (1, 1));
    }

    #[test]
    fn four_tiles_one_crossbar() {
        let p = plan_tiling(&[(1024, 1024)], &Crossbar::new(1, 512, 512), 1).unwrap();
        assert_eq!((p.total_tiles, p.waves), (4, 4));
        assert_eq!((p.layers[0].row_tiles, p.layers[0].col_tiles), (2, 2));
    }

    #[test]
    fn four_tiles_many_crossbars() {
        let p = plan_tiling(&[(1024, 1024)], &Crossbar::new(1000, 512, 512), 1).unwrap();
        assert_eq!((p.total_tiles, p.waves), (4, 1));
    }

    #[test]
    fn bit_slicing_widens_matrix() {
        let p = plan_tiling(&[(512, 512)], &Crossbar::new(1, 512, 512), 4).unwrap();
        assert_eq!(p.total_tiles, 4);
        assert_eq!(p.layers[0].values_per_tile, 128);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(plan_tiling(&[(0, 4)], &Crossbar::new(1, 8, 8), 1).is_err());
    }
}
