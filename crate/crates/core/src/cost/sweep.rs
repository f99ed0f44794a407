use serde::{Deserialize, Serialize};

use crate::arch::CoreConfig;
use crate::dataflow::WorkloadTrace;
use crate::error::{Error, Result};

use super::calibration::CalibrationProfile;
use super::costs::{core_costs, CoreWaves};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub count: usize,
    pub waves: CoreWaves,
    pub latency_s: f64,
    pub energy_j: f64,
    pub power_w: f64,
    /// Every core finishes in a single wave.
    pub saturated: bool,
}

/// Smallest uniform crossbar count at which every core needs one wave.
pub fn saturation_count(trace: &WorkloadTrace) -> u64 {
    [trace.search_ops, trace.scan_ops, trace.agg_tiles, trace.fx_tiles]
        .into_iter()
        .max()
        .unwrap_or(0)
        .max(1)
}

/// Latency, energy and power of `trace` as every core of `base` is scaled to
/// each crossbar count in `counts`.
pub fn scaling_sweep(
    trace: &WorkloadTrace,
    base: &CoreConfig,
    cal: &CalibrationProfile,
    counts: &[usize],
) -> Result<Vec<SweepPoint>> {
    if counts.contains(&0) {
        return Err(Error::Domain("crossbar counts must be positive".into()));
    }
    if counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("crossbar counts must be strictly ascending".into()));
    }
    Ok(counts
        .iter()
        .map(|&count| {
            let cfg = base.with_uniform_count(count);
            let c = core_costs(trace, &cfg, cal);
            let waves = CoreWaves::of(trace, &cfg);
            SweepPoint {
                count,
                waves,
                latency_s: c.t_compute,
                energy_j: c.energy(),
                power_w: c.p_compute,
                saturated: count as u64 >= saturation_count(trace),
            }
        })
        .collect())
}
