use xbar_gnn::bench::{
    fit_taxi, run_taxi, taxi_trace, Config, Context, TAXI_CENTRALIZED, TAXI_DECENTRALIZED, TAXI_NODES, TAXI_SCALING,
};
use xbar_gnn::arch::CoreConfig;
use xbar_gnn::cost::core_costs;
use xbar_gnn::net::{centralized_core_latencies, SettingKind};

#[test]
fn taxi_trace_counts() {
    let t = taxi_trace(&Config::default(), &CoreConfig::decentralized()).unwrap();
    assert_eq!((t.search_ops, t.scan_ops, t.agg_tiles, t.fx_tiles), (1, 10, 4, 18));
    assert_eq!(t.buffer_words, 11 * 512);
}

#[test]
fn centralized_rows_follow_from_decentralized() {
    let cores = CoreConfig::decentralized();
    let t = taxi_trace(&Config::default(), &cores).unwrap();
    let cal = fit_taxi(&t, &cores).unwrap();
    let node = core_costs(&t, &cores, &cal.decentralized);
    let scaled = centralized_core_latencies(&node, TAXI_SCALING, TAXI_NODES);
    let tol = [0.01, 0.01, 0.015];
    for i in 0..3 {
        let e = (scaled[i] - TAXI_CENTRALIZED.latency_s[i]).abs() / TAXI_CENTRALIZED.latency_s[i];
        assert!(e < tol[i], "core {i}: {e}");
    }
}

#[test]
fn per_core_powers_match_table() {
    let r = run_taxi(&Context::new(Config::default()).unwrap()).unwrap();
    let s = &r.scenarios[0];
    for (kind, col) in [(SettingKind::Centralized, TAXI_CENTRALIZED), (SettingKind::Decentralized, TAXI_DECENTRALIZED)] {
        let rep = s.setting(kind).unwrap();
        for (c, p) in rep.cores.iter().zip(col.power_w) {
            assert!((c.power_w - p).abs() / p < 1e-9, "{kind} {}: {} vs {p}", c.core, c.power_w);
        }
        assert!((rep.p_compute - col.net_power_w).abs() / col.net_power_w < 1e-3);
    }
}

#[test]
fn single_node_network_has_no_central_compute() {
    let mut c = Config::default();
    c.setting.n = 1;
    let r = run_taxi(&Context::new(c).unwrap()).unwrap();
    let cen = r.scenarios[0].setting(SettingKind::Centralized).unwrap();
    assert_eq!((cen.t_compute, cen.p_compute), (0.0, 0.0));
}

#[test]
fn report_shape() {
    let r = run_taxi(&Context::new(Config::default()).unwrap()).unwrap();
    assert_eq!(r.row_count(), 8);
    let csv = r.to_csv();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("scenario,setting,core,latency_s,energy_j,power_w,t_compute_s,t_comm_s,t_net_s,p_net_w\n"));
    r.check_consistency().unwrap();
    let mut bad = r.clone();
    bad.scenarios[0].ratios[0].value *= 1.001;
    assert!(bad.check_consistency().is_err());
}
