//! JSON-in/JSON-out entry points for the browser demo. The same functions
//! are callable natively, which is how they are tested.

use serde::{Deserialize, Serialize};

use xbar_gnn::arch::{CoreConfig, Crossbar};
use xbar_gnn::bench::{Config, Context, ScenarioReport};
use xbar_gnn::cost::{saturation_count, scaling_sweep, SweepPoint};
use xbar_gnn::dataflow::{cam_search, CamBank, LoadedCams};
use xbar_gnn::graph::{build_csr, builtin_dataset, load_edge_list, FeatureSource};

fn parse<'a, T: Deserialize<'a>>(json: &'a str) -> Result<T, String> {
    serde_json::from_str(json).map_err(|e| format!("bad request: {e}"))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Knobs of the centralized/decentralized explorer. Missing fields take the
/// taxi defaults.
#[derive(Debug, Deserialize)]
#[serde(default)]
pub struct TradeoffRequest {
    pub n: usize,
    pub cs: usize,
    pub t_e_ms: f64,
    pub t_lc_ms: f64,
    pub t_ln_ms: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl Default for TradeoffRequest {
    fn default() -> Self {
        let c = Config::default();
        Self {
            n: c.setting.n,
            cs: c.setting.cs,
            t_e_ms: c.link.t_e_ms,
            t_lc_ms: c.link.t_lc_ms,
            t_ln_ms: c.link.t_ln_ms,
            m1: c.setting.m1,
            m2: c.setting.m2,
            m3: c.setting.m3,
        }
    }
}

/// Taxi node workload under both settings with the requested network.
pub fn explore_tradeoff(request: &str) -> Result<String, String> {
    let r: TradeoffRequest = parse(request)?;
    let mut c = Config::default();
    c.setting.n = r.n;
    c.setting.cs = r.cs;
    c.setting.m1 = r.m1;
    c.setting.m2 = r.m2;
    c.setting.m3 = r.m3;
    c.link.t_e_ms = r.t_e_ms;
    c.link.t_lc_ms = r.t_lc_ms;
    c.link.t_ln_ms = r.t_ln_ms;
    let ctx = Context::new(c.clone()).map_err(|e| e.to_string())?;
    let trace = ctx.node_trace(r.cs, c.taxi.feature_len, &c.taxi.hidden).map_err(|e| e.to_string())?;
    let widths: Vec<usize> = std::iter::once(c.taxi.feature_len).chain(c.taxi.hidden.iter().copied()).collect();
    let s: ScenarioReport = ctx.evaluate("taxi", trace, r.n, r.cs, widths).map_err(|e| e.to_string())?;
    to_json(&s)
}

#[derive(Debug, Deserialize)]
pub struct SweepRequest {
    pub dataset: String,
    pub counts: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct SweepResponse {
    pub dataset: String,
    pub saturation_count: u64,
    pub points: Vec<SweepPoint>,
}

/// Node workload of a builtin dataset as every core grows.
pub fn crossbar_sweep(request: &str) -> Result<String, String> {
    let r: SweepRequest = parse(request)?;
    let d = builtin_dataset(&r.dataset).ok_or_else(|| format!("unknown dataset {:?}", r.dataset))?;
    let mut c = Config::default();
    c.sweep.dataset = d.name.into();
    let ctx = Context::new(c).map_err(|e| e.to_string())?;
    let trace = ctx
        .node_trace(d.stats.avg_cluster_size, d.stats.feature_len, &ctx.config.model.hidden)
        .map_err(|e| e.to_string())?;
    let points = scaling_sweep(&trace, &ctx.cores, &ctx.calibration.decentralized, &r.counts).map_err(|e| e.to_string())?;
    to_json(&SweepResponse { dataset: d.name.into(), saturation_count: saturation_count(&trace), points })
}

#[derive(Debug, Deserialize)]
pub struct TraverseRequest {
    /// Edge list text, one `src dst [weight]` per line.
    pub edges: String,
    pub dst: usize,
    /// CAM rows per bank.
    #[serde(default = "default_bank_rows")]
    pub bank_rows: usize,
}

fn default_bank_rows() -> usize {
    4
}

#[derive(Debug, Serialize)]
pub struct TraverseResponse {
    pub rp: Vec<usize>,
    pub ci: Vec<u32>,
    /// Match lines of each CI bank for key `dst`, e.g. "0110".
    pub search_banks: Vec<String>,
    /// In-neighbors found by scanning RP with each matched position.
    pub steps: Vec<ScanStep>,
    pub search_ops: u64,
    pub scan_ops: u64,
}

#[derive(Debug, Serialize)]
pub struct ScanStep {
    pub position: usize,
    pub source: u32,
    pub weight: f32,
}

/// CSR build plus CAM search/scan for one destination node.
pub fn traverse_demo(request: &str) -> Result<String, String> {
    let r: TraverseRequest = parse(request)?;
    let el = load_edge_list(r.edges.as_bytes()).map_err(|e| e.to_string())?;
    let g = build_csr(&el, FeatureSource::none()).map_err(|e| e.to_string())?;
    if r.dst >= g.node_count() {
        return Err(format!("node {} out of range (graph has {} nodes)", r.dst, g.node_count()));
    }
    let xbar = Crossbar::new(1, r.bank_rows.max(1), CoreConfig::decentralized().traversal.cols);
    let cams = LoadedCams::load(&g, &xbar).map_err(|e| e.to_string())?;
    let search_banks = g
        .ci()
        .chunks(xbar.rows)
        .map(|bank| {
            let words = bank.iter().map(|&c| u64::from(c)).collect();
            let cam = CamBank::search(words, xbar.cols as u32, xbar.rows)?;
            cam_search(&cam, r.dst as u64).map(|m| m.to_string())
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let t = cams.traverse(&g, r.dst).map_err(|e| e.to_string())?;
    let positions: Vec<usize> = g.ci().iter().enumerate().filter(|(_, &c)| c as usize == r.dst).map(|(p, _)| p).collect();
    let steps = positions
        .into_iter()
        .zip(&t.sources)
        .map(|(position, &(source, weight))| ScanStep { position, source, weight })
        .collect();
    to_json(&TraverseResponse {
        rp: g.rp().to_vec(),
        ci: g.ci().to_vec(),
        search_banks,
        steps,
        search_ops: t.ops.search_ops,
        scan_ops: t.ops.scan_ops,
    })
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen(js_name = exploreTradeoff)]
    pub fn explore_tradeoff(request: &str) -> Result<String, JsError> {
        super::explore_tradeoff(request).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = crossbarSweep)]
    pub fn crossbar_sweep(request: &str) -> Result<String, JsError> {
        super::crossbar_sweep(request).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = traverseDemo)]
    pub fn traverse_demo(request: &str) -> Result<String, JsError> {
        super::traverse_demo(request).map_err(|e| JsError::new(&e))
    }
}
