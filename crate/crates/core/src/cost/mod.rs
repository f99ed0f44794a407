//! Mapping operation traces onto core geometries and per-op constants.

mod calibration;
mod costs;
mod sweep;
mod tiling;

pub use calibration::{fit_calibration, CalibrationProfile};
pub use costs::{core_costs, CoreCosts, CoreWaves};
pub use sweep::{saturation_count, scaling_sweep, SweepPoint};
pub use tiling::{plan_tiling, waves, TileGrid, TilingPlan};
