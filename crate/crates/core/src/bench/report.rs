use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cost::{CoreWaves, SweepPoint};
use crate::dataflow::WorkloadTrace;
use crate::error::{Error, Result};
use crate::net::{NetReport, SettingKind};

use super::config::Config;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Metadata {
    pub fn of(config: &Config) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config.hash(),
            seed: config.seed,
        }
    }
}

/// Field of a [`NetReport`] a ratio refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    TCompute,
    TCommunicate,
    TNet,
    PCompute,
    PNet,
}

impl Field {
    fn of(self, r: &NetReport) -> f64 {
        match self {
            Field::TCompute => r.t_compute,
            Field::TCommunicate => r.t_communicate,
            Field::TNet => r.t_net,
            Field::PCompute => r.p_compute,
            Field::PNet => r.p_net,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub name: String,
    pub numerator: (SettingKind, Field),
    pub denominator: (SettingKind, Field),
    pub value: f64,
}

/// One workload evaluated under one or both settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub nodes: usize,
    pub cluster_size: usize,
    pub widths: Vec<usize>,
    pub trace: WorkloadTrace,
    pub settings: Vec<NetReport>,
    pub ratios: Vec<Ratio>,
}

const RATIOS: [(&str, SettingKind, Field, SettingKind, Field); 3] = [
    ("compute_speedup", SettingKind::Centralized, Field::TCompute, SettingKind::Decentralized, Field::TCompute),
    ("comm_speedup", SettingKind::Decentralized, Field::TCommunicate, SettingKind::Centralized, Field::TCommunicate),
    ("power_per_node_ratio", SettingKind::Centralized, Field::PCompute, SettingKind::Decentralized, Field::PCompute),
];

impl ScenarioReport {
    pub fn setting(&self, kind: SettingKind) -> Option<&NetReport> {
        self.settings.iter().find(|s| s.kind == kind)
    }

    fn lookup(&self, (kind, field): (SettingKind, Field)) -> Option<f64> {
        self.setting(kind).map(|r| field.of(r))
    }

    /// Fills `ratios` from the settings; ratios with a missing setting or a
    /// zero denominator are left out.
    pub fn with_ratios(mut self) -> Self {
        self.ratios = RATIOS
            .iter()
            .filter_map(|&(name, nk, nf, dk, df)| {
                let num = self.lookup((nk, nf))?;
                let den = self.lookup((dk, df))?;
                (den > 0.0).then(|| Ratio {
                    name: name.into(),
                    numerator: (nk, nf),
                    denominator: (dk, df),
                    value: num / den,
                })
            })
            .collect();
        self
    }

    pub fn ratio(&self, name: &str) -> Option<f64> {
        self.ratios.iter().find(|r| r.name == name).map(|r| r.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub name: String,
    /// Ratio averaged over every scenario that has it.
    pub of_ratio: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub metadata: Metadata,
    pub scenarios: Vec<ScenarioReport>,
    pub aggregates: Vec<Aggregate>,
    pub config: Config,
}

fn mean_of(scenarios: &[ScenarioReport], ratio: &str) -> Option<f64> {
    let vals: Vec<f64> = scenarios.iter().filter_map(|s| s.ratio(ratio)).collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

pub fn mean_aggregates(scenarios: &[ScenarioReport]) -> Vec<Aggregate> {
    ["compute_speedup", "comm_speedup", "power_per_node_ratio"]
        .into_iter()
        .filter_map(|r| {
            Some(Aggregate { name: format!("mean_{r}"), of_ratio: r.into(), value: mean_of(scenarios, r)? })
        })
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

impl Report {
    /// Recomputes every derived figure from its operands.
    pub fn check_consistency(&self) -> Result<()> {
        for s in &self.scenarios {
            for r in &s.settings {
                if !close(r.t_net, r.t_compute + r.t_communicate) || !close(r.p_net, r.p_compute + r.p_communicate) {
                    return Err(Error::Invariant(format!("{}/{}: totals are not additive", s.scenario, r.kind)));
                }
            }
            for ratio in &s.ratios {
                let (Some(num), Some(den)) = (s.lookup(ratio.numerator), s.lookup(ratio.denominator)) else {
                    return Err(Error::Invariant(format!("{}: ratio {} has missing operands", s.scenario, ratio.name)));
                };
                if !close(ratio.value, num / den) {
                    return Err(Error::Invariant(format!("{}: ratio {} != {num:e}/{den:e}", s.scenario, ratio.name)));
                }
            }
        }
        for a in &self.aggregates {
            match mean_of(&self.scenarios, &a.of_ratio) {
                Some(m) if close(m, a.value) => {}
                _ => return Err(Error::Invariant(format!("aggregate {} does not match its scenarios", a.name))),
            }
        }
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.scenarios.iter().map(|s| s.settings.iter().map(|r| 1 + r.cores.len()).sum::<usize>()).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "scenario,setting,core,latency_s,energy_j,power_w,t_compute_s,t_comm_s,t_net_s,p_net_w\n",
        );
        for s in &self.scenarios {
            for r in &s.settings {
                let _ = writeln!(
                    out,
                    "{},{},total,{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
                    s.scenario, r.kind, r.t_compute, r.e_compute, r.p_compute, r.t_compute, r.t_communicate, r.t_net, r.p_net
                );
                for c in &r.cores {
                    let _ = writeln!(
                        out,
                        "{},{},{},{:.6e},{:.6e},{:.6e},,,,",
                        s.scenario, r.kind, c.core, c.latency_s, c.energy_j, c.power_w
                    );
                }
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.scenarios {
            let _ = writeln!(out, "{} (N = {}, c_s = {})", s.scenario, s.nodes, s.cluster_size);
            for r in &s.settings {
                let _ = writeln!(out, "  {}", r.kind);
                for c in &r.cores {
                    let _ = writeln!(out, "    {:<12} {:>12} {:>12}", c.core, human_time(c.latency_s), human_power(c.power_w));
                }
                let _ = writeln!(out, "    {:<12} {:>12} {:>12}", "compute", human_time(r.t_compute), human_power(r.p_compute));
                let _ = writeln!(out, "    {:<12} {:>12} {:>12}", "comm", human_time(r.t_communicate), human_power(r.p_communicate));
            }
            for ratio in &s.ratios {
                let _ = writeln!(out, "  {} = {:.2}x", ratio.name, ratio.value);
            }
        }
        for a in &self.aggregates {
            let _ = writeln!(out, "{} = {:.1}x", a.name, a.value);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub metadata: Metadata,
    pub dataset: String,
    pub trace: WorkloadTrace,
    pub saturation_count: u64,
    pub points: Vec<SweepPoint>,
    pub config: Config,
}

impl SweepReport {
    pub fn check_monotone(&self) -> Result<()> {
        for w in self.points.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.latency_s > a.latency_s || b.power_w < a.power_w || !close(a.energy_j, b.energy_j) {
                return Err(Error::Invariant(format!(
                    "sweep is not monotone between {} and {} crossbars",
                    a.count, b.count
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "count,waves_search,waves_scan,waves_aggregation,waves_extraction,latency_s,energy_j,power_w,saturated\n",
        );
        for p in &self.points {
            let CoreWaves { search, scan, aggregation, extraction } = p.waves;
            let _ = writeln!(
                out,
                "{},{search},{scan},{aggregation},{extraction},{:.6e},{:.6e},{:.6e},{}",
                p.count, p.latency_s, p.energy_j, p.power_w, p.saturated
            );
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{} sweep (saturates at {} crossbars)\n", self.dataset, self.saturation_count);
        for p in &self.points {
            let _ = writeln!(
                out,
                "  {:>6} {:>12} {:>12}{}",
                p.count,
                human_time(p.latency_s),
                human_power(p.power_w),
                if p.saturated { "  saturated" } else { "" }
            );
        }
        out
    }
}

pub fn human_time(s: f64) -> String {
    scaled(s, &[(1.0, "s"), (1e-3, "ms"), (1e-6, "µs"), (1e-9, "ns")])
}

pub fn human_power(w: f64) -> String {
    scaled(w, &[(1.0, "W"), (1e-3, "mW"), (1e-6, "µW"), (1e-9, "nW")])
}

fn scaled(v: f64, units: &[(f64, &str)]) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v} {}", units[0].1);
    }
    let (div, unit) = units.iter().find(|(d, _)| v.abs() >= *d).unwrap_or(units.last().unwrap());
    format!("{:.2} {unit}", v / div)
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text)?;
    Ok(path)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn emit_report(report: &Report, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    Ok(vec![
        write(dir.join(format!("{stem}.csv")), &report.to_csv())?,
        write(dir.join(format!("{stem}.json")), &json(report))?,
    ])
}

pub fn emit_sweep(report: &SweepReport, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    Ok(vec![
        write(dir.join(format!("{stem}.csv")), &report.to_csv())?,
        write(dir.join(format!("{stem}.json")), &json(report))?,
    ])
}

pub fn emit_json<T: Serialize>(value: &T, dir: &Path, stem: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    write(dir.join(format!("{stem}.json")), &json(value))
}
