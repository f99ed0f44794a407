//! System-level latency and power of centralized and decentralized
//! deployments: compute from [`CoreCosts`], communication from [`LinkModel`].

use serde::{Deserialize, Serialize};

use crate::cost::CoreCosts;
use crate::error::{Error, Result};

/// Link parameters in SI units (seconds, watts, joules).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    /// Connection set-up time before a cluster exchange.
    pub t_e: f64,
    /// Inter-cluster (node to node) transfer latency.
    pub t_lc: f64,
    /// Node to central device transfer latency.
    pub t_ln: f64,
    /// Power drawn by the node to central device link. No measured value
    /// exists; the default is a placeholder.
    pub p_ln: f64,
    pub e_per_bit: f64,
    pub bits_per_activation: f64,
    /// Bytes moved per neighbor exchange.
    pub payload_bytes: usize,
}

/// Reference link throughput: 300 bytes in 1.1 ms.
pub const REFERENCE_PACKET_BYTES: usize = 300;
pub const REFERENCE_PACKET_TIME_S: f64 = 1.1e-3;

impl Default for LinkModel {
    fn default() -> Self {
        // Only t_e + 10 * t_lc = 203 ms is pinned down; the split is a
        // plausible ad-hoc wifi choice.
        Self {
            t_e: 3e-3,
            t_lc: 20e-3,
            t_ln: 3.3e-3,
            p_ln: 10e-3,
            e_per_bit: 1e-9,
            bits_per_activation: 1.0,
            payload_bytes: 864,
        }
    }
}

impl LinkModel {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.t_e, self.t_lc, self.t_ln, self.p_ln, self.e_per_bit, self.bits_per_activation];
        if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config("link parameters must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// `t_ln` scaled from the reference packet to `payload_bytes`.
    pub fn with_derived_t_ln(self) -> Self {
        Self { t_ln: t_ln_from_reference(self.payload_bytes), ..self }
    }
}

/// Transfer time of `payload_bytes` at the reference link's throughput.
pub fn t_ln_from_reference(payload_bytes: usize) -> f64 {
    payload_bytes as f64 / REFERENCE_PACKET_BYTES as f64 * REFERENCE_PACKET_TIME_S
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SettingKind {
    Centralized,
    Decentralized,
}

impl SettingKind {
    pub fn name(self) -> &'static str {
        match self {
            SettingKind::Centralized => "centralized",
            SettingKind::Decentralized => "decentralized",
        }
    }
}

impl std::fmt::Display for SettingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub kind: SettingKind,
    pub n: usize,
    pub cs: usize,
    /// Per-core capability of the central device relative to a node's.
    /// Ignored for decentralized settings.
    pub m: [f64; 3],
    /// Layer widths of the model, input first.
    pub widths: Vec<usize>,
}

impl Setting {
    pub fn centralized(n: usize, cs: usize, m: [f64; 3], widths: Vec<usize>) -> Self {
        Self { kind: SettingKind::Centralized, n, cs, m, widths }
    }

    pub fn decentralized(n: usize, cs: usize, widths: Vec<usize>) -> Self {
        Self { kind: SettingKind::Decentralized, n, cs, m: [1.0; 3], widths }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("node count must be at least 1".into()));
        }
        if self.m.iter().any(|m| !(m.is_finite() && *m >= 1.0)) {
            return Err(Error::Domain(format!("scaling factors {:?} must be >= 1", self.m)));
        }
        Ok(())
    }
}

pub fn t_compute_decentralized(c: &CoreCosts) -> f64 {
    c.t_compute
}

/// Per-core latencies of serving `n − 1` other nodes on the central device.
pub fn centralized_core_latencies(c: &CoreCosts, m: [f64; 3], n: usize) -> [f64; 3] {
    let others = n.saturating_sub(1) as f64;
    [c.t1 / m[0] * others, c.t2 / m[1] * others, c.t3 / m[2] * others]
}

pub fn t_compute_centralized(c: &CoreCosts, m: [f64; 3], n: usize) -> f64 {
    centralized_core_latencies(c, m, n).iter().sum()
}

/// Sequential exchange with each cluster neighbor, there and back.
pub fn t_comm_decentralized(l: &LinkModel, cs: usize) -> f64 {
    (l.t_e + cs as f64 * l.t_lc) * 2.0
}

/// Nodes talk to the central device concurrently.
pub fn t_comm_centralized(l: &LinkModel) -> f64 {
    l.t_ln
}

fn ratio_power(energy: f64, time: f64, what: &str) -> Result<f64> {
    if time > 0.0 {
        Ok(energy / time)
    } else if energy == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::UndefinedPower(format!("{what}: energy {energy:e} J in zero time")))
    }
}

/// Compute energy over compute latency. `c` holds one node's workload; the
/// central device does it `n − 1` times.
pub fn p_compute(c: &CoreCosts, setting: &Setting) -> Result<f64> {
    match setting.kind {
        SettingKind::Decentralized => ratio_power(c.energy(), c.t_compute, "decentralized compute"),
        SettingKind::Centralized => {
            let others = setting.n.saturating_sub(1) as f64;
            ratio_power(
                c.energy() * others,
                t_compute_centralized(c, setting.m, setting.n),
                "centralized compute",
            )
        }
    }
}

pub fn p_comm_centralized(l: &LinkModel) -> f64 {
    2.0 * l.p_ln
}

/// Activations of every hidden layer boundary shipped over inter-cluster
/// links. `widths` has one entry per layer boundary, input first.
pub fn p_comm_decentralized(l: &LinkModel, widths: &[usize]) -> Result<f64> {
    if l.t_lc <= 0.0 {
        return Err(Error::UndefinedPower("inter-cluster link latency is zero".into()));
    }
    let layers = widths.len().saturating_sub(1);
    let activations: usize = widths.iter().take(layers).skip(1).sum();
    Ok(activations as f64 * l.e_per_bit * l.bits_per_activation / l.t_lc)
}

/// All-pairs directed transfers inside one cluster.
pub fn cluster_transactions(cs: usize) -> u64 {
    let cs = cs as u64;
    cs * cs.saturating_sub(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreBreakdown {
    pub core: String,
    pub latency_s: f64,
    pub energy_j: f64,
    pub power_w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub kind: SettingKind,
    pub t_compute: f64,
    pub t_communicate: f64,
    pub t_net: f64,
    pub e_compute: f64,
    pub p_compute: f64,
    pub p_communicate: f64,
    pub p_net: f64,
    pub cores: Vec<CoreBreakdown>,
}

pub const CORE_NAMES: [&str; 3] = ["traversal", "aggregation", "extraction"];

/// Total latency and power of `setting` for one node's workload `costs`.
pub fn evaluate(setting: &Setting, costs: &CoreCosts, links: &LinkModel) -> Result<NetReport> {
    setting.validate()?;
    links.validate()?;
    let (t_compute, t_communicate, p_communicate, latencies, energies) = match setting.kind {
        SettingKind::Decentralized => (
            t_compute_decentralized(costs),
            t_comm_decentralized(links, setting.cs),
            p_comm_decentralized(links, &setting.widths)?,
            costs.latencies(),
            costs.energies(),
        ),
        SettingKind::Centralized => {
            let others = setting.n.saturating_sub(1) as f64;
            (
                t_compute_centralized(costs, setting.m, setting.n),
                t_comm_centralized(links),
                p_comm_centralized(links),
                centralized_core_latencies(costs, setting.m, setting.n),
                costs.energies().map(|e| e * others),
            )
        }
    };
    let p_compute = p_compute(costs, setting)?;
    let cores = CORE_NAMES
        .iter()
        .zip(latencies.iter().zip(energies))
        .map(|(name, (&latency_s, energy_j))| {
            Ok(CoreBreakdown {
                core: name.to_string(),
                latency_s,
                energy_j,
                power_w: ratio_power(energy_j, t_compute, name)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NetReport {
        kind: setting.kind,
        t_compute,
        t_communicate,
        t_net: t_compute + t_communicate,
        e_compute: energies.iter().sum(),
        p_compute,
        p_communicate,
        p_net: p_compute + p_communicate,
        cores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_costs() -> CoreCosts {
        CoreCosts::new([7.68e-9, 14.27e-6, 0.37e-6], [1e-12, 6e-10, 5e-11], false)
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn decentralized_compute_sums_cores() {
        assert!(rel(t_compute_decentralized(&table_costs()), 14.64768e-6) < 1e-9);
        assert_eq!(t_compute_decentralized(&CoreCosts::default()), 0.0);
        assert_eq!(t_compute_decentralized(&CoreCosts::new([1.0; 3], [0.0; 3], false)), 3.0);
    }

    #[test]
    fn centralized_compute_scales_by_others() {
        let t = t_compute_centralized(&table_costs(), [2000.0, 1000.0, 256.0], 10_000);
        assert!(rel(t, 157.34e-6) < 2e-3, "{t}");
        assert_eq!(t_compute_centralized(&table_costs(), [2000.0, 1000.0, 256.0], 1), 0.0);
        let c = CoreCosts::new([1.0, 2.0, 4.0], [0.0; 3], false);
        assert_eq!(t_compute_centralized(&c, [1.0; 3], 2), 7.0);
    }

    #[test]
    fn communication_latencies() {
        let l = LinkModel::default();
        assert!(rel(t_comm_decentralized(&l, 10), 0.406) < 1e-12);
        assert_eq!(t_comm_decentralized(&l, 0), 2.0 * l.t_e);
        let l0 = LinkModel { t_e: 0.0, ..l };
        assert_eq!(t_comm_decentralized(&l0, 8), 2.0 * t_comm_decentralized(&l0, 4));
        assert_eq!(t_comm_centralized(&l), 3.3e-3);
        assert!(rel(t_ln_from_reference(864), 3.168e-3) < 1e-12);
        assert_eq!(t_comm_centralized(&LinkModel { t_ln: 0.0, ..l }), 0.0);
    }

    #[test]
    fn communication_powers() {
        let l = LinkModel::default();
        assert_eq!(p_comm_centralized(&l), 20e-3);
        assert_eq!(p_comm_centralized(&LinkModel { p_ln: 0.0, ..l }), 0.0);
        assert_eq!(p_comm_decentralized(&l, &[7, 3]).unwrap(), 0.0);
        let p = p_comm_decentralized(&l, &[5, 64, 32, 2]).unwrap();
        assert!(rel(p, 4.8e-6) < 1e-12);
        let p2 = p_comm_decentralized(&LinkModel { e_per_bit: 2e-9, ..l }, &[5, 64, 32, 2]).unwrap();
        assert!(rel(p2, 2.0 * p) < 1e-12);
        assert!(matches!(
            p_comm_decentralized(&LinkModel { t_lc: 0.0, ..l }, &[1, 2, 3]),
            Err(Error::UndefinedPower(_))
        ));
    }

    #[test]
    fn transactions() {
        assert_eq!(cluster_transactions(10), 90);
        assert_eq!(cluster_transactions(1), 0);
        assert_eq!(cluster_transactions(2), 2);
        assert_eq!(cluster_transactions(0), 0);
    }

    #[test]
    fn zero_time_power() {
        let s = Setting::decentralized(10, 2, vec![4, 2]);
        assert_eq!(p_compute(&CoreCosts::default(), &s).unwrap(), 0.0);
        let c = CoreCosts::new([0.0; 3], [1.0, 0.0, 0.0], false);
        assert!(matches!(p_compute(&c, &s), Err(Error::UndefinedPower(_))));
    }

    #[test]
    fn evaluate_is_additive() {
        let l = LinkModel::default();
        let m = [2000.0, 1000.0, 256.0];
        for s in [Setting::centralized(10_000, 10, m, vec![512, 128, 64]), Setting::decentralized(10_000, 10, vec![512, 128, 64])] {
            let r = evaluate(&s, &table_costs(), &l).unwrap();
            assert_eq!(r.t_net, r.t_compute + r.t_communicate);
            assert_eq!(r.p_net, r.p_compute + r.p_communicate);
            let core_sum: f64 = r.cores.iter().map(|c| c.latency_s).sum();
            assert!(rel(core_sum, r.t_compute) < 1e-12);
            let power_sum: f64 = r.cores.iter().map(|c| c.power_w).sum();
            assert!(rel(power_sum, r.p_compute) < 1e-12);
        }
        let c = evaluate(&Setting::centralized(10_000, 10, m, vec![1, 1]), &table_costs(), &l).unwrap();
        let d = evaluate(&Setting::decentralized(10_000, 10, vec![1, 1]), &table_costs(), &l).unwrap();
        assert!(rel(c.t_net, 3.457e-3) < 1e-3);
        assert!(rel(d.t_net, 406.01e-3) < 1e-4);
        let comm = d.t_communicate / c.t_communicate;
        assert!((119.0..=127.0).contains(&comm));
    }

    #[test]
    fn evaluate_rejects_bad_setting() {
        let mut s = Setting::centralized(0, 1, [1.0; 3], vec![]);
        assert!(evaluate(&s, &table_costs(), &LinkModel::default()).is_err());
        s.n = 5;
        s.m = [0.5, 1.0, 1.0];
        assert!(evaluate(&s, &table_costs(), &LinkModel::default()).is_err());
    }
}
