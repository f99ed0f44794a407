use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use rayon::prelude::*;

use crate::arch::CoreConfig;
use crate::cost::{core_costs, saturation_count, scaling_sweep};
use crate::dataflow::{Emulator, WorkloadTrace};
use crate::error::{Error, Result};
use crate::graph::{mix_seed,
    build_csr, builtin_dataset, graph_stats, load_edge_list, synth_graph_with, FeatureSource, GraphStats, SynthOptions,
};
use crate::net::{evaluate, LinkModel, Setting, SettingKind};

use super::calibrate::{resolve_calibration, taxi_trace, Calibration, TAXI_CLUSTER_SIZE};
use super::config::{ClusterSizeSource, Config, GraphSource};
use super::report::{mean_aggregates, Metadata, Report, ScenarioReport, SweepReport};

/// Inputs shared by every scenario of one run.
#[derive(Clone, Debug)]
pub struct Context {
    pub config: Config,
    pub cores: CoreConfig,
    pub calibration: Calibration,
    pub link: LinkModel,
}

impl Context {
    pub fn new(config: Config) -> Result<Self> {
        config.validate()?;
        let cores = config.cores.resolve()?;
        let calibration = resolve_calibration(&config, &cores)?;
        let link = config.link.model()?;
        Ok(Self { config, cores, calibration, link })
    }

    fn emulator(&self) -> Emulator {
        Emulator::new(self.cores, self.config.quant).with_mode(self.config.model.aggregation)
    }

    /// One node's workload: a cluster of `cs` neighbors feeding the model.
    pub fn node_trace(&self, cs: usize, feature_len: usize, hidden: &[usize]) -> Result<WorkloadTrace> {
        self.emulator().cluster_trace(cs, feature_len, hidden)
    }

    /// Evaluates `trace` under the configured settings.
    pub fn evaluate(&self, name: &str, trace: WorkloadTrace, n: usize, cs: usize, widths: Vec<usize>) -> Result<ScenarioReport> {
        let settings = self
            .config
            .setting
            .kind
            .kinds()
            .into_iter()
            .map(|kind| {
                let (setting, profile) = match kind {
                    SettingKind::Centralized => (
                        Setting::centralized(n, cs, self.config.setting.m(), widths.clone()),
                        &self.calibration.centralized,
                    ),
                    SettingKind::Decentralized => {
                        (Setting::decentralized(n, cs, widths.clone()), &self.calibration.decentralized)
                    }
                };
                evaluate(&setting, &core_costs(&trace, &self.cores, profile), &self.link)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioReport {
            scenario: name.into(),
            nodes: n,
            cluster_size: cs,
            widths,
            trace,
            settings,
            ratios: vec![],
        }
        .with_ratios())
    }

    fn report(&self, kind: &str, scenarios: Vec<ScenarioReport>) -> Result<Report> {
        let aggregates = if scenarios.len() > 1 { mean_aggregates(&scenarios) } else { vec![] };
        let r = Report {
            kind: kind.into(),
            metadata: Metadata::of(&self.config),
            scenarios,
            aggregates,
            config: self.config.clone(),
        };
        r.check_consistency()?;
        Ok(r)
    }
}

fn widths(input: usize, hidden: &[usize]) -> Vec<usize> {
    std::iter::once(input).chain(hidden.iter().copied()).collect()
}

/// The taxi case study: `setting.n` nodes in clusters of `setting.cs`.
pub fn run_taxi(ctx: &Context) -> Result<Report> {
    let c = &ctx.config;
    let trace = if c.setting.cs == TAXI_CLUSTER_SIZE {
        taxi_trace(c, &ctx.cores)?
    } else {
        ctx.node_trace(c.setting.cs, c.taxi.feature_len, &c.taxi.hidden)?
    };
    let s = ctx.evaluate("taxi", trace, c.setting.n, c.setting.cs, widths(c.taxi.feature_len, &c.taxi.hidden))?;
    ctx.report("taxi", vec![s])
}

/// Statistics a dataset scenario runs on.
fn dataset_stats(ctx: &Context, name: &str, index: usize) -> Result<GraphStats> {
    let d = &ctx.config.datasets;
    let table = builtin_dataset(name).ok_or_else(|| Error::Config(format!("unknown dataset {name:?}")))?;
    match d.source {
        GraphSource::Builtin => Ok(table.stats),
        GraphSource::Synthetic => {
            let opts = SynthOptions { distribution: d.distribution, memory_cap_bytes: d.memory_cap_mb << 20 };
            let seed = mix_seed(ctx.config.seed, index as u64);
            let g = synth_graph_with(&table.stats, seed, &opts)?;
            let measured = graph_stats(&g);
            if measured.node_count != table.stats.node_count || measured.edge_count != table.stats.edge_count {
                return Err(Error::Invariant(format!("synthetic {name} does not match its statistics")));
            }
            Ok(match d.cluster_size {
                ClusterSizeSource::Table => measured.with_cluster_size(table.stats.avg_cluster_size),
                ClusterSizeSource::Graph => measured,
            })
        }
    }
}

fn file_stats(path: &Path, feature_len: usize) -> Result<GraphStats> {
    let el = load_edge_list(BufReader::new(File::open(path)?))?;
    let g = build_csr(&el, FeatureSource::Seed { seed: 0, feature_len })?;
    Ok(graph_stats(&g))
}

/// Centralized versus decentralized breakdown for each configured dataset.
pub fn run_dataset_comparison(ctx: &Context) -> Result<Report> {
    let d = &ctx.config.datasets;
    let hidden = &ctx.config.model.hidden;
    let scenarios = if let Some(path) = &d.graph_file {
        let stats = file_stats(path, d.graph_feature_len)?;
        let name = path.file_stem().map_or("graph".into(), |s| s.to_string_lossy().into_owned());
        let trace = ctx.node_trace(stats.avg_cluster_size, stats.feature_len, hidden)?;
        vec![ctx.evaluate(&name, trace, stats.node_count, stats.avg_cluster_size, widths(stats.feature_len, hidden))?]
    } else {
        d.names
            .par_iter()
            .enumerate()
            .map(|(i, name)| {
                let stats = dataset_stats(ctx, name, i)?;
                let cs = stats.avg_cluster_size;
                let trace = ctx.node_trace(cs, stats.feature_len, hidden)?;
                ctx.evaluate(&name.to_ascii_lowercase(), trace, stats.node_count, cs, widths(stats.feature_len, hidden))
            })
            .collect::<Result<Vec<_>>>()?
    };
    ctx.report("datasets", scenarios)
}

/// Node workload of `sweep.dataset` as every core grows.
pub fn run_scaling_sweep(ctx: &Context) -> Result<SweepReport> {
    let s = &ctx.config.sweep;
    let table = builtin_dataset(&s.dataset).ok_or_else(|| Error::Config(format!("unknown dataset {:?}", s.dataset)))?;
    let trace = ctx.node_trace(table.stats.avg_cluster_size, table.stats.feature_len, &ctx.config.model.hidden)?;
    let points = scaling_sweep(&trace, &ctx.cores, &ctx.calibration.decentralized, &s.counts)?;
    let r = SweepReport {
        metadata: Metadata::of(&ctx.config),
        dataset: table.name.into(),
        trace,
        saturation_count: saturation_count(&trace),
        points,
        config: ctx.config.clone(),
    };
    r.check_monotone()?;
    Ok(r)
}
