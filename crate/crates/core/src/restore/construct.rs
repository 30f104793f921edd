//! Builds a graph realizing the target degree vector and target joint degree
//! matrix around the sampled subgraph, by uniform random half-edge pairing
//! within degree classes.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::crawl::SampledSubgraph;
use crate::graph::Multigraph;
use crate::restore::jdm::{ClassCounts, TargetJdm};
use crate::restore::target::{DegreeAssignment, TargetDegreeVector};

#[derive(Debug, Clone)]
pub struct ConstructedGraph {
    pub graph: Multigraph,
    /// Edge instances created by the pairing stage, i.e. everything that is
    /// not a subgraph edge. These are the rewiring candidates.
    pub added_edges: Vec<(u32, u32)>,
    /// Target degree per node; realized exactly by `graph`.
    pub target_degree: Vec<u32>,
}

/// Subgraph nodes keep their dense ids `0..n'`; the remaining target mass
/// becomes fresh nodes with shuffled degrees. Each subgraph node contributes
/// `d* - d'` free half-edges and each added node `d*`; classes are then wired
/// with `m*(k, k') - m'(k, k')` uniform random pairings.
///
/// Panics on half-edge exhaustion mismatch, which would mean the targets
/// violate the realizability conditions upstream.
pub fn construct_graph(
    sub: &SampledSubgraph,
    dv: &TargetDegreeVector,
    assign: &DegreeAssignment,
    jdm: &TargetJdm,
    m_prime: &ClassCounts,
    rng: &mut ChaCha8Rng,
) -> ConstructedGraph {
    let k_max = dv.k_max();
    let n_sub = sub.graph.node_count();
    let n_total = dv.total_nodes() as usize;
    assert!(
        n_total >= n_sub,
        "target node count {n_total} below subgraph size {n_sub}"
    );
    assert_eq!(assign.target.len(), n_sub);

    let mut graph = Multigraph::new(n_total);
    for (u, v) in sub.graph.edges() {
        graph.add_edge(u, v);
    }

    // degrees for the added nodes: degree k appears n*(k) - n'(k) times
    let n_prime = assign.class_counts(k_max);
    let mut dseq: Vec<u32> = Vec::with_capacity(n_total - n_sub);
    for k in 1..=k_max {
        let spare = dv
            .n_at(k)
            .checked_sub(n_prime[k as usize])
            .expect("DV-3 violated: subgraph needs more degree-k nodes than targeted");
        dseq.extend(std::iter::repeat_n(k, spare as usize));
    }
    assert_eq!(
        dseq.len(),
        n_total - n_sub,
        "degree sequence does not cover the added nodes"
    );
    dseq.shuffle(rng);

    let mut target_degree = assign.target.clone();
    while let Some(k) = dseq.pop() {
        target_degree.push(k);
    }

    // free half-edges per degree class
    let mut stubs: Vec<Vec<u32>> = vec![Vec::new(); k_max as usize + 1];
    for (i, &tk) in target_degree.iter().enumerate() {
        let k = tk as usize;
        let have = if i < n_sub {
            sub.graph.degree(i as u32)
        } else {
            0
        };
        let free = (k)
            .checked_sub(have)
            .expect("subgraph degree exceeds assigned target degree");
        stubs[k].extend(std::iter::repeat_n(i as u32, free));
    }

    let mut added_edges = Vec::new();
    for (k, k2, m_star) in jdm.sorted_entries() {
        let have = m_prime.get(k, k2);
        assert!(
            m_star >= have,
            "JDM-4 violated at ({k},{k2}): target {m_star} below subgraph count {have}"
        );
        for _ in 0..(m_star - have) {
            let (u, v) = if k == k2 {
                let list = &mut stubs[k as usize];
                assert!(list.len() >= 2, "half-edge exhaustion in class {k}");
                let i1 = rng.gen_range(0..list.len());
                let mut i2 = rng.gen_range(0..list.len() - 1);
                if i2 >= i1 {
                    i2 += 1;
                }
                let (hi, lo) = (i1.max(i2), i1.min(i2));
                let v = list.swap_remove(hi);
                let u = list.swap_remove(lo);
                (u, v)
            } else {
                assert!(
                    !stubs[k as usize].is_empty() && !stubs[k2 as usize].is_empty(),
                    "half-edge exhaustion in class pair ({k},{k2})"
                );
                let i1 = rng.gen_range(0..stubs[k as usize].len());
                let u = stubs[k as usize].swap_remove(i1);
                let i2 = rng.gen_range(0..stubs[k2 as usize].len());
                let v = stubs[k2 as usize].swap_remove(i2);
                (u, v)
            };
            graph.add_edge(u, v);
            added_edges.push((u, v));
        }
    }

    for (k, list) in stubs.iter().enumerate() {
        assert!(
            list.is_empty(),
            "{} unmatched half-edges left in class {k}",
            list.len()
        );
    }

    ConstructedGraph {
        graph,
        added_edges,
        target_degree,
    }
}
