use std::io::Cursor;

use proptest::prelude::*;
use xbar_gnn::graph::{
    build_csr, load_edge_list, neighbor_sample, synth_graph, CsrGraph, Edge, EdgeList, FeatureSource, GraphStats,
};

fn edge_list() -> impl Strategy<Value = EdgeList> {
    (1usize..40).prop_flat_map(|n| {
        prop::collection::vec((0..n as u32, 0..n as u32, 1u8..5), 0..120).prop_map(move |es| {
            let edges = es.into_iter().map(|(s, d, w)| Edge::weighted(s, d, f32::from(w))).collect();
            EdgeList::new(n, edges).unwrap()
        })
    })
}

fn sorted(mut es: Vec<Edge>) -> Vec<(u32, u32, u32)> {
    let mut v: Vec<_> = es.drain(..).map(|e| (e.src, e.dst, e.weight.to_bits())).collect();
    v.sort();
    v
}

proptest! {
    #[test]
    fn csr_round_trip_preserves_multiset(el in edge_list()) {
        let g = build_csr(&el, FeatureSource::none()).unwrap();
        g.validate().unwrap();
        prop_assert_eq!(g.node_count(), el.node_count);
        prop_assert_eq!(sorted(g.expand().edges), sorted(el.edges.clone()));
        let again = CsrGraph::from_arrays(g.arrays(), g.features().clone()).unwrap();
        prop_assert_eq!(again.arrays(), g.arrays());
    }

    #[test]
    fn row_pointers_are_degree_prefix_sums(el in edge_list()) {
        let g = build_csr(&el, FeatureSource::none()).unwrap();
        let mut deg = vec![0usize; el.node_count];
        for e in &el.edges {
            deg[e.src as usize] += 1;
        }
        let mut acc = 0;
        for (i, d) in deg.iter().enumerate() {
            prop_assert_eq!(g.rp()[i], acc);
            acc += d;
        }
        prop_assert_eq!(*g.rp().last().unwrap(), acc);
    }

    #[test]
    fn text_round_trip(el in edge_list()) {
        let mut text = format!("# nodes {}\n", el.node_count);
        for e in &el.edges {
            text += &format!("{} {} {}\n", e.src, e.dst, e.weight);
        }
        let back = load_edge_list(Cursor::new(text)).unwrap();
        prop_assert_eq!(back.node_count, el.node_count);
        prop_assert_eq!(sorted(back.edges), sorted(el.edges.clone()));
    }

    #[test]
    fn samples_are_distinct_neighbors(el in edge_list(), k in 0usize..6, seed in any::<u64>()) {
        let g = build_csr(&el, FeatureSource::none()).unwrap();
        for node in 0..g.node_count() {
            let s = neighbor_sample(&g, node, k, seed);
            prop_assert_eq!(s.len(), k.min(g.degree(node)));
            let mut row: Vec<u32> = g.neighbors(node).to_vec();
            for v in &s {
                let pos = row.iter().position(|x| x == v);
                prop_assert!(pos.is_some());
                row.remove(pos.unwrap());
            }
            prop_assert_eq!(&s, &neighbor_sample(&g, node, k, seed));
        }
    }
}

#[test]
fn synthetic_graph_hits_stats() {
    let stats = GraphStats::new(2708, 5429, 16);
    let g = synth_graph(&stats, 3).unwrap();
    assert_eq!((g.node_count(), g.edge_count()), (2708, 5429));
    assert_eq!(synth_graph(&stats, 3).unwrap().arrays(), g.arrays());
}
