//! Functional emulation of the traversal, aggregation and feature
//! extraction cores.

mod cam;
mod emu;
mod matrix;
mod model;
mod mvm;
mod quant;
mod traverse;

pub use cam::{cam_compare, cam_scan, cam_search, CamBank, CamKind, MatchLines};
pub use emu::{
    aggregate, feature_extract, run_inference, AggregationMode, AggregationResult, Emulator,
    ExtractionResult, Inference, WorkloadTrace,
};
pub use matrix::Matrix;
pub use model::{Activation, GnnModel};
pub use mvm::{bit_serial_mvm, mvm, tile_grid, tiled_mvm, MvmOutput, TiledOutput};
pub use quant::{quantize, QuantSpec};
pub use traverse::{traverse, traverse_on, LoadedCams, Traversal, TraversalOps};
