use serde::{Deserialize, Serialize};

use crate::arch::CoreConfig;
use crate::cost::{core_costs, fit_calibration, CalibrationProfile, CoreCosts};
use crate::dataflow::{Emulator, WorkloadTrace};
use crate::error::{Error, Result};
use crate::net::t_compute_centralized;

use super::config::{CalibrationSource, Config};

/// Published per-core latency (s) and power (W) of one deployment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceColumn {
    pub latency_s: [f64; 3],
    pub power_w: [f64; 3],
    pub net_latency_s: f64,
    pub net_power_w: f64,
}

pub const TAXI_DECENTRALIZED: ReferenceColumn = ReferenceColumn {
    latency_s: [7.68e-9, 14.27e-6, 0.37e-6],
    power_w: [0.21e-3, 41.6e-3, 3.68e-3],
    net_latency_s: 14.6e-6,
    net_power_w: 45.49e-3,
};

pub const TAXI_CENTRALIZED: ReferenceColumn = ReferenceColumn {
    latency_s: [38.43e-9, 142.77e-6, 14.53e-6],
    power_w: [10.8e-3, 780.1e-3, 32.21e-3],
    net_latency_s: 157.34e-6,
    net_power_w: 823.11e-3,
};

pub const TAXI_COMM_CENTRALIZED_S: f64 = 3.3e-3;
pub const TAXI_COMM_DECENTRALIZED_S: f64 = 406e-3;

/// Deployment the reference table was measured on.
pub const TAXI_NODES: usize = 10_000;
pub const TAXI_CLUSTER_SIZE: usize = 10;
pub const TAXI_SCALING: [f64; 3] = [2000.0, 1000.0, 256.0];

/// Constants for the node device and the central device. Both share latency
/// constants (same crossbar technology); energies are fitted per device.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub decentralized: CalibrationProfile,
    pub centralized: CalibrationProfile,
}

/// One node's workload in the taxi case study.
pub fn taxi_trace(config: &Config, cores: &CoreConfig) -> Result<WorkloadTrace> {
    Emulator::new(*cores, config.quant).with_mode(config.model.aggregation).cluster_trace(
        TAXI_CLUSTER_SIZE,
        config.taxi.feature_len,
        &config.taxi.hidden,
    )
}

/// Fits both profiles to the reference table on `trace`.
///
/// Node energies are power × net latency, so the node device reproduces the
/// published power exactly. Central-device energies per served node are
/// chosen so the `(N − 1)`-fold workload over the scaled latency reproduces
/// the published central power.
pub fn fit_taxi(trace: &WorkloadTrace, cores: &CoreConfig) -> Result<Calibration> {
    let t_dec: f64 = TAXI_DECENTRALIZED.latency_s.iter().sum();
    let target = CoreCosts::new(TAXI_DECENTRALIZED.latency_s, TAXI_DECENTRALIZED.power_w.map(|p| p * t_dec), false);
    let decentralized = fit_calibration(&target, trace, cores)?;

    let node = core_costs(trace, cores, &decentralized);
    let t_cen = t_compute_centralized(&node, TAXI_SCALING, TAXI_NODES);
    let per_node = TAXI_CENTRALIZED.power_w.map(|p| p * t_cen / (TAXI_NODES - 1) as f64);
    let cen_target = CoreCosts::new(node.latencies(), per_node, false);
    let cen_fit = fit_calibration(&cen_target, trace, cores)?;
    Ok(Calibration { decentralized, centralized: decentralized.with_energies_of(&cen_fit) })
}

/// Calibration named by the config.
pub fn resolve_calibration(config: &Config, cores: &CoreConfig) -> Result<Calibration> {
    match config.calibration.source {
        CalibrationSource::FitTaxi => fit_taxi(&taxi_trace(config, cores)?, cores),
        CalibrationSource::Explicit => match (config.calibration.decentralized, config.calibration.centralized) {
            (Some(decentralized), Some(centralized)) => Ok(Calibration { decentralized, centralized }),
            _ => Err(Error::Config("explicit calibration is missing a profile".into())),
        },
    }
}
