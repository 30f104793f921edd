//! Full restoration pipeline: subgraph induction, estimation, target
//! construction, graph assembly, and rewiring.

pub mod construct;
pub mod jdm;
pub mod rewire;
pub mod target;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::crawl::{induced_subgraph, SampledSubgraph, SamplingList};
use crate::error::Result;
use crate::estimate::{estimate_all, LocalEstimates};
use crate::graph::Multigraph;

pub use construct::{construct_graph, ConstructedGraph};
pub use jdm::{
    adjust_jdm, init_jdm, jdm3_holds, modify_jdm, subgraph_class_counts, ClassCounts, TargetJdm,
};
pub use rewire::{rewirable_edges, rewire, RewireConfig, RewireStats};
pub use target::{
    adjust_degree_vector, init_degree_vector, modify_degree_vector, DegreeAssignment,
    TargetDegreeVector,
};

#[derive(Debug, Clone)]
pub struct RestoreConfig {
    pub rng_seed: u64,
    /// Rewiring attempts per candidate edge.
    pub r_c: u64,
    /// Override for the collision threshold M (default `floor(0.025 r)`).
    pub m_override: Option<usize>,
    /// Rewiring re-sync interval.
    pub resync_interval: u64,
}

impl Default for RestoreConfig {
    fn default() -> Self {
        RestoreConfig {
            rng_seed: 0,
            r_c: 500,
            m_override: None,
            resync_interval: 1_000_000,
        }
    }
}

/// Pipeline variants. The proposed method uses the subgraph everywhere; the
/// reproducible 2.5K baseline skips the subgraph-aware steps and rewires
/// every edge.
#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    /// Build targets around the sampled subgraph and construct on top of it.
    pub use_subgraph: bool,
    /// Exclude the subgraph's edges from the rewiring candidates.
    pub protect_subgraph: bool,
}

impl PipelineOptions {
    pub fn proposed() -> Self {
        PipelineOptions {
            use_subgraph: true,
            protect_subgraph: true,
        }
    }

    pub fn baseline_from_estimates_only() -> Self {
        PipelineOptions {
            use_subgraph: false,
            protect_subgraph: false,
        }
    }
}

/// Wall-clock split of one generation run (seconds).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub estimate_secs: f64,
    pub targets_secs: f64,
    pub construct_secs: f64,
    pub rewire_secs: f64,
    pub total_secs: f64,
}

/// Everything the pipeline decided, for provenance and debugging.
#[derive(Debug, Clone)]
pub struct RestoreReport {
    pub estimates: LocalEstimates,
    /// Final target degree vector entries `(k, n*(k))`.
    pub degree_vector: Vec<(u32, u64)>,
    /// Final target joint degree matrix entries `(k, k', m*(k, k'))`.
    pub jdm: Vec<(u32, u32, u64)>,
    /// Target degree assigned to each subgraph node (dense subgraph ids).
    pub subgraph_assignment: Vec<u32>,
    pub subgraph_nodes: usize,
    pub subgraph_edges: usize,
    pub total_nodes: usize,
    pub total_edges: usize,
    pub rewire: RewireStats,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone)]
pub struct RestoreOutcome {
    pub graph: Multigraph,
    pub report: RestoreReport,
    pub subgraph: SampledSubgraph,
}

/// The proposed method: preserve the sampled subgraph and the five local
/// estimates.
pub fn restore(list: &SamplingList, cfg: &RestoreConfig) -> Result<RestoreOutcome> {
    restore_with_options(list, cfg, PipelineOptions::proposed())
}

pub fn restore_with_options(
    list: &SamplingList,
    cfg: &RestoreConfig,
    opts: PipelineOptions,
) -> Result<RestoreOutcome> {
    let t_start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let sub = if opts.use_subgraph {
        induced_subgraph(list)?
    } else {
        SampledSubgraph::empty()
    };

    let t0 = Instant::now();
    let est = estimate_all(list, cfg.m_override)?;
    let estimate_secs = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let mut dv = init_degree_vector(&est, &sub);
    adjust_degree_vector(&mut dv, &est);
    let assign = if opts.use_subgraph {
        modify_degree_vector(&mut dv, &sub, &est, &mut rng)
    } else {
        DegreeAssignment::empty()
    };

    let mut jdm = init_jdm(&est, dv.k_max());
    adjust_jdm(&mut jdm, &mut dv, &est, &ClassCounts::default(), &mut rng);
    let m_prime = if opts.use_subgraph {
        subgraph_class_counts(&sub, &assign)
    } else {
        ClassCounts::default()
    };
    if !m_prime.is_empty() {
        modify_jdm(&mut jdm, &m_prime, &mut dv, &est, &mut rng);
    }
    let targets_secs = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let built = construct_graph(&sub, &dv, &assign, &jdm, &m_prime, &mut rng);
    let construct_secs = t0.elapsed().as_secs_f64();

    let ConstructedGraph {
        mut graph,
        added_edges,
        target_degree: _,
    } = built;

    let rewirable = if opts.protect_subgraph {
        added_edges
    } else {
        graph.edges().collect()
    };

    // target clustering: estimate support, degrees outside it count as zero
    let c_target = est.c_k.clone();

    let t0 = Instant::now();
    let rewire_cfg = RewireConfig {
        r_c: cfg.r_c,
        resync_interval: cfg.resync_interval,
    };
    let rewire_stats = rewire(&mut graph, rewirable, &c_target, &rewire_cfg, &mut rng);
    let rewire_secs = t0.elapsed().as_secs_f64();

    let report = RestoreReport {
        degree_vector: dv.entries().collect(),
        jdm: jdm.sorted_entries(),
        subgraph_assignment: assign.target.clone(),
        subgraph_nodes: sub.graph.node_count(),
        subgraph_edges: sub.graph.edge_count(),
        total_nodes: graph.node_count(),
        total_edges: graph.edge_count(),
        rewire: rewire_stats,
        timings: PhaseTimings {
            estimate_secs,
            targets_secs,
            construct_secs,
            rewire_secs,
            total_secs: t_start.elapsed().as_secs_f64(),
        },
        estimates: est,
    };

    Ok(RestoreOutcome {
        graph,
        report,
        subgraph: sub,
    })
}
