use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arch::CoreConfig;
use crate::cost::CalibrationProfile;
use crate::dataflow::{AggregationMode, QuantSpec};
use crate::error::{Error, Result};
use crate::graph::{builtin_dataset, DegreeDistribution};
use crate::net::{LinkModel, SettingKind};

/// Everything a run depends on. Every field has a default, so an empty file
/// is a valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub quant: QuantSpec,
    pub link: LinkConfig,
    pub setting: SettingConfig,
    pub taxi: TaxiConfig,
    pub model: ModelConfig,
    pub datasets: DatasetsConfig,
    pub sweep: SweepConfig,
    pub cores: CoresConfig,
    pub calibration: CalibrationConfig,
    pub verify: VerifyConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 42,
            quant: QuantSpec::default(),
            link: LinkConfig::default(),
            setting: SettingConfig::default(),
            taxi: TaxiConfig::default(),
            model: ModelConfig::default(),
            datasets: DatasetsConfig::default(),
            sweep: SweepConfig::default(),
            cores: CoresConfig::default(),
            calibration: CalibrationConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

/// Link parameters in the units they are usually quoted in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub t_e_ms: f64,
    pub t_lc_ms: f64,
    pub t_ln_ms: f64,
    /// Ignore `t_ln_ms` and scale the 300 B / 1.1 ms reference link to
    /// `payload_bytes` instead.
    pub derive_t_ln: bool,
    pub p_ln_mw: f64,
    pub e_per_bit_nj: f64,
    pub bits_per_activation: f64,
    pub payload_bytes: usize,
}

impl Default for LinkConfig {
    fn default() -> Self {
        let l = LinkModel::default();
        Self {
            t_e_ms: l.t_e * 1e3,
            t_lc_ms: l.t_lc * 1e3,
            t_ln_ms: l.t_ln * 1e3,
            derive_t_ln: false,
            p_ln_mw: l.p_ln * 1e3,
            e_per_bit_nj: l.e_per_bit * 1e9,
            bits_per_activation: l.bits_per_activation,
            payload_bytes: l.payload_bytes,
        }
    }
}

impl LinkConfig {
    pub fn model(&self) -> Result<LinkModel> {
        let base = LinkModel {
            t_e: self.t_e_ms * 1e-3,
            t_lc: self.t_lc_ms * 1e-3,
            t_ln: self.t_ln_ms * 1e-3,
            p_ln: self.p_ln_mw * 1e-3,
            e_per_bit: self.e_per_bit_nj * 1e-9,
            bits_per_activation: self.bits_per_activation,
            payload_bytes: self.payload_bytes,
        };
        let l = if self.derive_t_ln { base.with_derived_t_ln() } else { base };
        l.validate()?;
        Ok(l)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SettingChoice {
    Centralized,
    Decentralized,
    #[default]
    Both,
}

impl SettingChoice {
    pub fn kinds(self) -> Vec<SettingKind> {
        match self {
            SettingChoice::Centralized => vec![SettingKind::Centralized],
            SettingChoice::Decentralized => vec![SettingKind::Decentralized],
            SettingChoice::Both => vec![SettingKind::Centralized, SettingKind::Decentralized],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SettingConfig {
    pub kind: SettingChoice,
    pub n: usize,
    pub cs: usize,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl Default for SettingConfig {
    fn default() -> Self {
        Self { kind: SettingChoice::Both, n: 10_000, cs: 10, m1: 2000.0, m2: 1000.0, m3: 256.0 }
    }
}

impl SettingConfig {
    pub fn m(&self) -> [f64; 3] {
        [self.m1, self.m2, self.m3]
    }
}

/// Per-node workload used to fit the calibration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaxiConfig {
    pub feature_len: usize,
    pub hidden: Vec<usize>,
}

impl Default for TaxiConfig {
    fn default() -> Self {
        Self { feature_len: 512, hidden: vec![128, 64] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Hidden and output widths; the input width is the dataset's.
    pub hidden: Vec<usize>,
    pub aggregation: AggregationMode,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { hidden: vec![128, 16], aggregation: AggregationMode::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphSource {
    /// Published statistics only.
    #[default]
    Builtin,
    /// Materialize a synthetic graph matching the statistics.
    Synthetic,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterSizeSource {
    /// Published average cluster size.
    #[default]
    Table,
    /// Rounded mean degree of the graph.
    Graph,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetsConfig {
    pub names: Vec<String>,
    pub source: GraphSource,
    pub cluster_size: ClusterSizeSource,
    pub distribution: DegreeDistribution,
    pub memory_cap_mb: usize,
    /// Edge list replacing the builtin datasets.
    pub graph_file: Option<PathBuf>,
    /// Feature length assumed for `graph_file`.
    pub graph_feature_len: usize,
}

impl Default for DatasetsConfig {
    fn default() -> Self {
        Self {
            names: ["livejournal", "collab", "cora", "citeseer"].map(String::from).to_vec(),
            source: GraphSource::Builtin,
            cluster_size: ClusterSizeSource::Table,
            distribution: DegreeDistribution::Uniform,
            memory_cap_mb: 4096,
            graph_file: None,
            graph_feature_len: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub dataset: String,
    pub counts: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { dataset: "cora".into(), counts: vec![1, 2, 4, 8, 16, 32, 64, 128] }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorePreset {
    Centralized,
    #[default]
    Decentralized,
    Custom,
}

/// Geometry of the per-node device. Scenario traces, the calibration fit and
/// the sweep base all use it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoresConfig {
    pub preset: CorePreset,
    pub custom: Option<CoreConfig>,
}

impl CoresConfig {
    pub fn resolve(&self) -> Result<CoreConfig> {
        let cfg = match self.preset {
            CorePreset::Centralized => CoreConfig::centralized(),
            CorePreset::Decentralized => CoreConfig::decentralized(),
            CorePreset::Custom => self
                .custom
                .ok_or_else(|| Error::Config("cores.preset = \"custom\" needs a [cores.custom] table".into()))?,
        };
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationSource {
    /// Fit to the reference per-core table on the taxi workload.
    #[default]
    FitTaxi,
    /// Use the profiles given in the config.
    Explicit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub source: CalibrationSource,
    /// Per-node device constants.
    pub decentralized: Option<CalibrationProfile>,
    /// Central device constants; energies differ from the node's.
    pub centralized: Option<CalibrationProfile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub graphs: usize,
    pub max_nodes: usize,
    pub max_features: usize,
    pub tiles: usize,
    /// JSON `{rp, ci, e}` arrays checked for CSR validity.
    pub csr_fixture: Option<PathBuf>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { graphs: 100, max_nodes: 50, max_features: 8, tiles: 500, csr_fixture: None }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        self.quant.validate().map_err(cfg)?;
        self.link.model()?;
        self.cores.resolve()?;
        let s = &self.setting;
        if s.n == 0 || s.m().iter().any(|m| !(m.is_finite() && *m >= 1.0)) {
            return Err(Error::Config("setting.n must be >= 1 and m1..m3 >= 1".into()));
        }
        if self.taxi.feature_len == 0 || self.taxi.hidden.contains(&0) || self.model.hidden.contains(&0) {
            return Err(Error::Config("layer widths must be positive".into()));
        }
        if self.datasets.graph_file.is_none() {
            for name in &self.datasets.names {
                if builtin_dataset(name).is_none() {
                    return Err(Error::Config(format!("unknown dataset {name:?}")));
                }
            }
        }
        if builtin_dataset(&self.sweep.dataset).is_none() {
            return Err(Error::Config(format!("unknown sweep dataset {:?}", self.sweep.dataset)));
        }
        if self.calibration.source == CalibrationSource::Explicit
            && (self.calibration.decentralized.is_none() || self.calibration.centralized.is_none())
        {
            return Err(Error::Config(
                "calibration.source = \"explicit\" needs [calibration.decentralized] and [calibration.centralized]".into(),
            ));
        }
        for p in [self.calibration.decentralized, self.calibration.centralized].iter().flatten() {
            p.validate()?;
        }
        Ok(())
    }
}
