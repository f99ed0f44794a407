//! Scenario harness: configuration, the taxi case study, the dataset
//! comparison, crossbar-count sweeps, self-verification and report files.

mod calibrate;
mod config;
mod report;
mod scenarios;
mod verify;

pub use calibrate::{
    fit_taxi, resolve_calibration, taxi_trace, Calibration, ReferenceColumn, TAXI_CENTRALIZED, TAXI_CLUSTER_SIZE,
    TAXI_COMM_CENTRALIZED_S, TAXI_COMM_DECENTRALIZED_S, TAXI_DECENTRALIZED, TAXI_NODES, TAXI_SCALING,
};
pub use config::{
    CalibrationConfig, CalibrationSource, ClusterSizeSource, Config, CorePreset, CoresConfig, DatasetsConfig,
    GraphSource, LinkConfig, ModelConfig, SettingChoice, SettingConfig, SweepConfig, TaxiConfig, VerifyConfig,
};
pub use report::{
    emit_json, emit_report, emit_sweep, human_power, human_time, mean_aggregates, Aggregate, Field, Metadata, Ratio,
    Report, ScenarioReport, SweepReport,
};
pub use scenarios::{run_dataset_comparison, run_scaling_sweep, run_taxi, Context};
pub use verify::{check_csr_fixture, check_quantized_tile, random_graph, verify, SuiteResult, VerifySummary};
