use serde::{Deserialize, Serialize};

use crate::arch::CoreConfig;
use crate::dataflow::WorkloadTrace;
use crate::error::{Error, Result};

use super::costs::{CoreCosts, CoreWaves};

/// Per-operation latency (s) and energy (J) constants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationProfile {
    pub t_search_op: f64,
    pub t_scan_op: f64,
    pub e_search_op: f64,
    pub e_scan_op: f64,
    pub t_mvm_tile_agg: f64,
    pub t_mvm_tile_fx: f64,
    pub e_mvm_tile_agg: f64,
    pub e_mvm_tile_fx: f64,
    #[serde(default)]
    pub t_buffer_word: f64,
    #[serde(default)]
    pub e_buffer_word: f64,
}

impl CalibrationProfile {
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.t_search_op,
            self.t_scan_op,
            self.e_search_op,
            self.e_scan_op,
            self.t_mvm_tile_agg,
            self.t_mvm_tile_fx,
            self.e_mvm_tile_agg,
            self.e_mvm_tile_fx,
            self.t_buffer_word,
            self.e_buffer_word,
        ];
        if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config("calibration constants must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// Same latency constants, energy constants taken from `other`.
    pub fn with_energies_of(self, other: &CalibrationProfile) -> Self {
        Self {
            e_search_op: other.e_search_op,
            e_scan_op: other.e_scan_op,
            e_mvm_tile_agg: other.e_mvm_tile_agg,
            e_mvm_tile_fx: other.e_mvm_tile_fx,
            e_buffer_word: other.e_buffer_word,
            ..self
        }
    }
}

fn per_unit(target: f64, units: u64, what: &str) -> Result<f64> {
    match (units, target) {
        (0, 0.0) => Ok(0.0),
        (0, t) => Err(Error::InfeasibleFit(format!("{what}: target {t:e} with zero operations"))),
        (n, t) => Ok(t / n as f64),
    }
}

/// Per-op constants that make [`super::core_costs`] reproduce `target`'s
/// per-core latencies and energies on `trace`. Search and scan share one
/// per-op cost; buffer constants are zero.
pub fn fit_calibration(target: &CoreCosts, trace: &WorkloadTrace, cfg: &CoreConfig) -> Result<CalibrationProfile> {
    let w = CoreWaves::of(trace, cfg);
    let t_cam = per_unit(target.t1, w.search + w.scan, "traversal latency")?;
    let e_cam = per_unit(target.e1, trace.search_ops + trace.scan_ops, "traversal energy")?;
    Ok(CalibrationProfile {
        t_search_op: t_cam,
        t_scan_op: t_cam,
        e_search_op: e_cam,
        e_scan_op: e_cam,
        t_mvm_tile_agg: per_unit(target.t2, w.aggregation, "aggregation latency")?,
        t_mvm_tile_fx: per_unit(target.t3, w.extraction, "extraction latency")?,
        e_mvm_tile_agg: per_unit(target.e2, trace.agg_tiles, "aggregation energy")?,
        e_mvm_tile_fx: per_unit(target.e3, trace.fx_tiles, "extraction energy")?,
        t_buffer_word: 0.0,
        e_buffer_word: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::core_costs;

    fn trace() -> WorkloadTrace {
        WorkloadTrace { nodes: 1, search_ops: 1, scan_ops: 10, agg_tiles: 4, fx_tiles: 18, buffer_words: 5632 }
    }

    fn target() -> CoreCosts {
        CoreCosts::new([7.68e-9, 14.27e-6, 0.37e-6], [1e-12, 6e-7, 5e-11], false)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-30)
    }

    #[test]
    fn fit_reproduces_target() {
        let cfg = CoreConfig::decentralized();
        let cal = fit_calibration(&target(), &trace(), &cfg).unwrap();
        let got = core_costs(&trace(), &cfg, &cal);
        for (a, b) in got.latencies().iter().zip(target().latencies()) {
            assert!(close(*a, b), "{a} vs {b}");
        }
        for (a, b) in got.energies().iter().zip(target().energies()) {
            assert!(close(*a, b), "{a} vs {b}");
        }
    }

    #[test]
    fn refit_is_idempotent() {
        let cfg = CoreConfig::decentralized();
        let cal = fit_calibration(&target(), &trace(), &cfg).unwrap();
        let again = fit_calibration(&core_costs(&trace(), &cfg, &cal), &trace(), &cfg).unwrap();
        let fields = |c: &CalibrationProfile| [c.t_search_op, c.t_mvm_tile_agg, c.t_mvm_tile_fx, c.e_scan_op, c.e_mvm_tile_agg, c.e_mvm_tile_fx];
        for (a, b) in fields(&cal).iter().zip(fields(&again)) {
            assert!(close(*a, b));
        }
    }

    #[test]
    fn doubled_workload_doubles_latency() {
        let cfg = CoreConfig::decentralized();
        let cal = fit_calibration(&target(), &trace(), &cfg).unwrap();
        let one = core_costs(&trace(), &cfg, &cal);
        let two = core_costs(&trace().scaled(2), &cfg, &cal);
        assert!(close(two.t_compute, 2.0 * one.t_compute));
    }

    #[test]
    fn zero_ops_with_nonzero_target_is_infeasible() {
        let t = WorkloadTrace { fx_tiles: 0, ..trace() };
        assert!(matches!(
            fit_calibration(&target(), &t, &CoreConfig::decentralized()),
            Err(Error::InfeasibleFit(_))
        ));
    }
}
