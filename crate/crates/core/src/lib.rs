//! Functional emulator and analytical cost model for GNN inference on
//! resistive-crossbar in-memory accelerators, in centralized (one large
//! edge device) and decentralized (one small device per node) settings.

pub mod arch;
pub mod bench;
pub mod error;
pub mod cost;
pub mod dataflow;
pub mod graph;
pub mod net;

pub use error::{Error, Result};
