//! Property tests of the structural invariants.

mod common;

use graphmend::crawl::{induced_subgraph, random_walk, CrawlBudget};
use graphmend::estimate::estimate_all;
use graphmend::graph::{load_edge_list, preprocess};
use graphmend::metrics::compute_paths;
use graphmend::Multigraph;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_from_pairs(pairs: &[(u8, u8)]) -> Multigraph {
    let n = pairs
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .max()
        .map(|m| m as usize + 1)
        .unwrap_or(1);
    Multigraph::from_edges(
        n,
        &pairs
            .iter()
            .map(|&(a, b)| (a as u32, b as u32))
            .collect::<Vec<_>>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn handshake_and_round_trip(pairs in proptest::collection::vec((0u8..40, 0u8..40), 1..120)) {
        let g = graph_from_pairs(&pairs);
        let degree_sum: usize = (0..g.node_count()).map(|i| g.degree(i as u32)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());

        // load -> store -> load is exact (loaded graphs have dense ids with
        // every node incident to an edge)
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        g.write_edge_list(&path).unwrap();
        let first = load_edge_list(&path).unwrap();
        let path2 = dir.path().join("g2.txt");
        first.write_edge_list(&path2).unwrap();
        let second = load_edge_list(&path2).unwrap();
        prop_assert_eq!(first.node_count(), second.node_count());
        prop_assert_eq!(first.edge_multiset(), second.edge_multiset());
        let degree_sum: usize = (0..first.node_count()).map(|i| first.degree(i as u32)).sum();
        prop_assert_eq!(degree_sum, 2 * first.edge_count());
    }

    #[test]
    fn preprocess_idempotent_and_simple(pairs in proptest::collection::vec((0u8..30, 0u8..30), 1..80)) {
        let g = graph_from_pairs(&pairs);
        let once = preprocess(&g).unwrap();
        // simple: no loops, multiplicity at most one
        for (u, v) in once.edges() {
            prop_assert_ne!(u, v);
            prop_assert_eq!(once.multiplicity(u, v), 1);
        }
        prop_assert!(once.is_connected());
        let twice = preprocess(&once).unwrap();
        prop_assert_eq!(once.edge_multiset(), twice.edge_multiset());
    }

    #[test]
    fn walk_invariants(seed in 0u64..500, fraction in 0.1f64..1.0) {
        let mut gen = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected_graph(12, 10, &mut gen);
        let budget = CrawlBudget::new(fraction).unwrap();
        let walk = random_walk(&g, 0, budget, &mut gen).unwrap();

        // consecutive entries are adjacent in the original graph
        for i in 0..walk.len() - 1 {
            prop_assert!(walk.neighbors(i).contains(&walk.node(i + 1)));
        }
        // budget reached exactly
        let distinct: std::collections::HashSet<u32> =
            walk.entries.iter().map(|e| e.0).collect();
        prop_assert_eq!(distinct.len(), budget.target_nodes(g.node_count()));

        // Lemma 1 on the induced subgraph
        let sub = induced_subgraph(&walk).unwrap();
        for i in 0..sub.node_count() {
            let p = sub.to_parent[i];
            if sub.queried[i] {
                prop_assert_eq!(sub.graph.degree(i as u32), g.degree(p));
            } else {
                prop_assert!(sub.graph.degree(i as u32) <= g.degree(p));
            }
            // subgraph edges are a sub-multiset of the original's
            for j in 0..sub.node_count() {
                let q = sub.to_parent[j];
                prop_assert!(sub.graph.multiplicity(i as u32, j as u32) <= g.multiplicity(p, q));
            }
        }
    }

    #[test]
    fn degree_distribution_estimate_sums_to_one(seed in 0u64..200) {
        let mut gen = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected_graph(15, 12, &mut gen);
        let walk = random_walk(&g, 0, CrawlBudget::new(0.9).unwrap(), &mut gen).unwrap();
        if walk.len() < 3 {
            return Ok(());
        }
        let est = estimate_all(&walk, None);
        if let Ok(est) = est {
            let total: f64 = est.p_k.values().sum();
            prop_assert!((total - 1.0).abs() < 1e-9, "sum {}", total);
            // joint degree estimate is symmetric by construction
            for &(a, b) in est.p_kk.keys() {
                prop_assert!(a <= b);
            }
        }
    }
}

/// Path metrics must be bit-identical across worker counts.
#[test]
fn path_metrics_parallel_determinism() {
    let mut gen = ChaCha8Rng::seed_from_u64(99);
    let g = common::random_connected_graph(300, 500, &mut gen);

    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| compute_paths(&g));
    let multi = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| compute_paths(&g));

    assert_eq!(
        single.l_avg.unwrap().to_bits(),
        multi.l_avg.unwrap().to_bits()
    );
    assert_eq!(single.l_max, multi.l_max);
    assert_eq!(single.p_l.len(), multi.p_l.len());
    for (k, v) in &single.p_l {
        assert_eq!(v.to_bits(), multi.p_l[k].to_bits(), "p_l[{k}]");
    }
    for (k, v) in &single.b_k {
        assert_eq!(v.to_bits(), multi.b_k[k].to_bits(), "b_k[{k}]");
    }
}

#[test]
fn dot_export_shape() {
    let g = Multigraph::from_edges(3, &[(0, 1), (1, 2), (2, 2)]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    g.write_dot(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("graph g {"));
    assert!(text.contains("0 -- 1;"));
    assert!(text.contains("2 -- 2;"));
    assert!(text.trim_end().ends_with('}'));
}
