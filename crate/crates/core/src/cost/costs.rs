use serde::{Deserialize, Serialize};

use crate::arch::CoreConfig;
use crate::dataflow::WorkloadTrace;

use super::calibration::CalibrationProfile;
use super::tiling::waves;

/// Latency (s) and energy (J) per core, plus the combined compute figures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoreCosts {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub t_compute: f64,
    /// `(e1 + e2 + e3) / t_compute`; zero for an empty workload and
    /// infinite for energy spent in zero time.
    pub p_compute: f64,
}

impl CoreCosts {
    pub fn new(t: [f64; 3], e: [f64; 3], overlap_agg_fx: bool) -> Self {
        let t_compute = if overlap_agg_fx {
            t[0] + t[1].max(t[2])
        } else {
            t[0] + t[1] + t[2]
        };
        let energy = e.iter().sum::<f64>();
        let p_compute = match (t_compute > 0.0, energy > 0.0) {
            (true, _) => energy / t_compute,
            (false, false) => 0.0,
            (false, true) => f64::INFINITY,
        };
        Self { t1: t[0], t2: t[1], t3: t[2], e1: e[0], e2: e[1], e3: e[2], t_compute, p_compute }
    }

    pub fn latencies(&self) -> [f64; 3] {
        [self.t1, self.t2, self.t3]
    }

    pub fn energies(&self) -> [f64; 3] {
        [self.e1, self.e2, self.e3]
    }

    pub fn energy(&self) -> f64 {
        self.e1 + self.e2 + self.e3
    }
}

/// Wave counts of a trace on a geometry: search, scan, aggregation, extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreWaves {
    pub search: u64,
    pub scan: u64,
    pub aggregation: u64,
    pub extraction: u64,
}

impl CoreWaves {
    pub fn of(trace: &WorkloadTrace, cfg: &CoreConfig) -> Self {
        Self {
            search: waves(trace.search_ops, cfg.traversal.count),
            scan: waves(trace.scan_ops, cfg.traversal.count),
            aggregation: waves(trace.agg_tiles, cfg.aggregation.count),
            extraction: waves(trace.fx_tiles, cfg.extraction.count),
        }
    }
}

/// Maps a trace onto a geometry. Latency follows the wave count of each
/// core; energy follows the raw operation count and so does not depend on
/// how many crossbars share the work.
pub fn core_costs(trace: &WorkloadTrace, cfg: &CoreConfig, cal: &CalibrationProfile) -> CoreCosts {
    let w = CoreWaves::of(trace, cfg);
    let buffer_time = if cfg.double_buffering {
        0.0
    } else {
        trace.buffer_words as f64 * cal.t_buffer_word
    };
    let t1 = w.search as f64 * cal.t_search_op + w.scan as f64 * cal.t_scan_op;
    let t2 = w.aggregation as f64 * cal.t_mvm_tile_agg + buffer_time;
    let t3 = w.extraction as f64 * cal.t_mvm_tile_fx;
    let e1 = trace.search_ops as f64 * cal.e_search_op + trace.scan_ops as f64 * cal.e_scan_op;
    let e2 = trace.agg_tiles as f64 * cal.e_mvm_tile_agg + trace.buffer_words as f64 * cal.e_buffer_word;
    let e3 = trace.fx_tiles as f64 * cal.e_mvm_tile_fx;
    CoreCosts::new([t1, t2, t3], [e1, e2, e3], cfg.overlap_agg_fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cal() -> CalibrationProfile {
        CalibrationProfile {
            t_search_op: 1.0,
            t_scan_op: 2.0,
            e_search_op: 0.5,
            e_scan_op: 0.25,
            t_mvm_tile_agg: 10.0,
            t_mvm_tile_fx: 3.0,
            e_mvm_tile_agg: 4.0,
            e_mvm_tile_fx: 1.0,
            t_buffer_word: 0.0,
            e_buffer_word: 0.0,
        }
    }

    fn trace() -> WorkloadTrace {
        WorkloadTrace { nodes: 1, search_ops: 2, scan_ops: 6, agg_tiles: 8, fx_tiles: 5, buffer_words: 0 }
    }

    #[test]
    fn empty_trace_costs_nothing() {
        let c = core_costs(&WorkloadTrace::default(), &CoreConfig::decentralized(), &cal());
        assert_eq!(c, CoreCosts::default());
    }

    #[test]
    fn single_crossbar_hand_count() {
        let c = core_costs(&trace(), &CoreConfig::decentralized(), &cal());
        assert_eq!(c.latencies(), [2.0 + 12.0, 80.0, 15.0]);
        assert_eq!(c.energies(), [1.0 + 1.5, 32.0, 5.0]);
        assert_eq!(c.t_compute, 109.0);
        assert_eq!(c.p_compute, 39.5 / 109.0);
    }

    #[test]
    fn doubling_crossbars_halves_waves() {
        let one = CoreConfig::decentralized().with_uniform_count(2);
        let two = CoreConfig::decentralized().with_uniform_count(4);
        let a = core_costs(&trace(), &one, &cal());
        let b = core_costs(&trace(), &two, &cal());
        assert_eq!(b.t2 * 2.0, a.t2);
        assert_eq!(a.energies(), b.energies());
    }

    #[test]
    fn overlap_takes_max_of_pipelined_stages() {
        let mut cfg = CoreConfig::decentralized();
        let plain = core_costs(&trace(), &cfg, &cal());
        cfg.overlap_agg_fx = true;
        let piped = core_costs(&trace(), &cfg, &cal());
        assert_eq!(piped.t_compute, 14.0 + 80.0);
        assert!(piped.t_compute <= plain.t_compute);
        assert_eq!(piped.energy(), plain.energy());
    }

    #[test]
    fn double_buffering_hides_buffer_time_only() {
        let mut c = cal();
        c.t_buffer_word = 0.5;
        c.e_buffer_word = 0.1;
        let t = WorkloadTrace { buffer_words: 10, ..trace() };
        let mut cfg = CoreConfig::decentralized();
        let a = core_costs(&t, &cfg, &c);
        cfg.double_buffering = true;
        let b = core_costs(&t, &cfg, &c);
        assert_eq!(a.t2 - b.t2, 5.0);
        assert_eq!(a.e2, b.e2);
    }
}
