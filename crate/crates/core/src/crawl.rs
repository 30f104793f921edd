//! Crawler simulation under the restricted query model, and construction of
//! the edge-induced sampled subgraph.
//!
//! Querying a node reveals its full incident-edge list and nothing else. A
//! crawl budget counts *distinct* queried nodes; a random-walk revisit is
//! recorded again in the trace but does not consume budget.

use std::collections::{HashSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};
use crate::graph::Multigraph;

/// Ordered record of a crawl: per query, the node id and the neighbor list
/// captured at query time. Entries may repeat when a walk revisits a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingList {
    pub entries: Vec<(u32, Vec<u32>)>,
}

impl SamplingList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn node(&self, i: usize) -> u32 {
        self.entries[i].0
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.entries[i].1
    }

    /// One line per step: `x : n1 n2 n3 ...`.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for (x, nbrs) in &self.entries {
            write!(w, "{} :", x).map_err(|e| Error::io(path, e))?;
            for v in nbrs {
                write!(w, " {}", v).map_err(|e| Error::io(path, e))?;
            }
            writeln!(w).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<SamplingList> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut entries = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let Some((head, tail)) = trimmed.split_once(':') else {
                return Err(Error::InvalidSamplingList(format!(
                    "{}:{}: missing ':' separator",
                    path.display(),
                    idx + 1
                )));
            };
            let parse = |tok: &str| -> Result<u32> {
                tok.parse::<u32>().map_err(|_| {
                    Error::InvalidSamplingList(format!(
                        "{}:{}: bad node id {:?}",
                        path.display(),
                        idx + 1,
                        tok
                    ))
                })
            };
            let x = parse(head.trim())?;
            let nbrs = tail
                .split_whitespace()
                .map(parse)
                .collect::<Result<Vec<_>>>()?;
            entries.push((x, nbrs));
        }
        if entries.is_empty() {
            return Err(Error::InvalidSamplingList(format!(
                "{}: no entries",
                path.display()
            )));
        }
        Ok(SamplingList { entries })
    }
}

/// Target fraction of queried nodes relative to the original graph size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrawlBudget {
    fraction: f64,
}

impl CrawlBudget {
    pub fn new(fraction: f64) -> Result<Self> {
        if fraction > 0.0 && fraction <= 1.0 {
            Ok(CrawlBudget { fraction })
        } else {
            Err(Error::InvalidFraction(fraction))
        }
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    /// Number of distinct queried nodes to reach on a graph of `n` nodes.
    pub fn target_nodes(&self, n: usize) -> usize {
        ((self.fraction * n as f64).ceil() as usize).clamp(1, n)
    }
}

fn check_seed(g: &Multigraph, seed: u32) -> Result<()> {
    g.check_node(seed)?;
    if g.degree(seed) == 0 {
        return Err(Error::ZeroDegreeSeed { id: seed });
    }
    Ok(())
}

/// Simple random walk. Each step queries the current node, records its full
/// neighbor list, and moves along a uniformly random incident edge. The walk
/// stops at the first step where the count of distinct queried nodes reaches
/// the budget.
pub fn random_walk(
    g: &Multigraph,
    seed_node: u32,
    budget: CrawlBudget,
    rng: &mut ChaCha8Rng,
) -> Result<SamplingList> {
    let target = budget.target_nodes(g.node_count());
    random_walk_until(g, seed_node, rng, |distinct, _| distinct >= target)
}

/// Random walk of exactly `r` steps (used by estimator studies where the
/// trace length, not the queried fraction, is prescribed).
pub fn random_walk_steps(
    g: &Multigraph,
    seed_node: u32,
    r: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SamplingList> {
    random_walk_until(g, seed_node, rng, |_, steps| steps >= r)
}

fn random_walk_until(
    g: &Multigraph,
    seed_node: u32,
    rng: &mut ChaCha8Rng,
    stop: impl Fn(usize, usize) -> bool,
) -> Result<SamplingList> {
    check_seed(g, seed_node)?;
    let mut entries = Vec::new();
    let mut queried: HashSet<u32> = HashSet::new();
    let mut current = seed_node;
    loop {
        let nbrs = g.neighbors(current).to_vec();
        queried.insert(current);
        entries.push((current, nbrs));
        if stop(queried.len(), entries.len()) {
            break;
        }
        let list = g.neighbors(current);
        current = list[rng.gen_range(0..list.len())];
    }
    Ok(SamplingList { entries })
}

/// Breadth-first crawl. Each dequeued node is one query; unvisited neighbors
/// are enqueued in ascending id order so the traversal is deterministic.
pub fn bfs_crawl(g: &Multigraph, seed_node: u32, budget: CrawlBudget) -> Result<SamplingList> {
    check_seed(g, seed_node)?;
    let target = budget.target_nodes(g.node_count());
    let mut entries = Vec::new();
    let mut visited: HashSet<u32> = HashSet::new();
    let mut queue = VecDeque::new();
    visited.insert(seed_node);
    queue.push_back(seed_node);
    let mut distinct = 0usize;
    while let Some(u) = queue.pop_front() {
        let nbrs = g.neighbors(u).to_vec();
        entries.push((u, nbrs));
        distinct += 1;
        if distinct >= target {
            break;
        }
        let mut fresh: Vec<u32> = g
            .neighbors(u)
            .iter()
            .copied()
            .filter(|v| !visited.contains(v))
            .collect();
        fresh.sort_unstable();
        fresh.dedup();
        for v in fresh {
            visited.insert(v);
            queue.push_back(v);
        }
    }
    Ok(SamplingList { entries })
}

/// Snowball crawl: a BFS variant where each queried node enqueues at most `k`
/// uniformly random unvisited neighbors. If the frontier dies out before the
/// budget is met, the process revives from a uniformly random already-sampled
/// node (the forest-fire revival rule).
pub fn snowball_crawl(
    g: &Multigraph,
    seed_node: u32,
    budget: CrawlBudget,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SamplingList> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            msg: "snowball neighbor cap must be >= 1".into(),
        });
    }
    burn_crawl(g, seed_node, budget, rng, |_rng, unvisited| {
        k.min(unvisited)
    })
}

/// Forest-fire crawl: per queried node, a count `c` is drawn from a geometric
/// distribution with mean `p_f / (1 - p_f)` and `min(c, #unvisited)` uniformly
/// random unvisited neighbors are burned. Dies out and revives like snowball.
pub fn forest_fire_crawl(
    g: &Multigraph,
    seed_node: u32,
    budget: CrawlBudget,
    p_f: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SamplingList> {
    if !(p_f > 0.0 && p_f < 1.0) {
        return Err(Error::InvalidParameter {
            name: "p_f",
            msg: format!("forward-burning probability must lie in (0, 1), got {p_f}"),
        });
    }
    // Geometric(p) over {0, 1, ...} has mean (1-p)/p; success probability
    // 1 - p_f gives the required mean p_f / (1 - p_f).
    let geom = Geometric::new(1.0 - p_f).expect("valid probability");
    burn_crawl(g, seed_node, budget, rng, move |rng, unvisited| {
        (geom.sample(rng) as usize).min(unvisited)
    })
}

/// Shared frontier-burning loop for snowball and forest fire. `burn_count`
/// maps the number of unvisited neighbors to how many get enqueued.
///
/// Two node sets are tracked. "Scheduled" nodes were burned or queried and are
/// no longer eligible for burning. "Observed" nodes are everything seen so far
/// (scheduled plus every neighbor in a recorded list); revival after a die-out
/// draws uniformly from the observed set, so a crawl whose fire keeps dying
/// still reaches any budget on a connected graph.
fn burn_crawl(
    g: &Multigraph,
    seed_node: u32,
    budget: CrawlBudget,
    rng: &mut ChaCha8Rng,
    burn_count: impl Fn(&mut ChaCha8Rng, usize) -> usize,
) -> Result<SamplingList> {
    check_seed(g, seed_node)?;
    let target = budget.target_nodes(g.node_count());
    let mut entries = Vec::new();
    let mut queried: HashSet<u32> = HashSet::new();
    let mut scheduled: HashSet<u32> = HashSet::from([seed_node]);
    let mut observed: Vec<u32> = vec![seed_node];
    let mut observed_set: HashSet<u32> = HashSet::from([seed_node]);
    let mut queue = VecDeque::from([seed_node]);
    loop {
        let Some(u) = queue.pop_front() else {
            // frontier died out: revive from a uniformly random observed node
            // (a revived already-queried node is simply re-queried)
            let pick = observed[rng.gen_range(0..observed.len())];
            scheduled.insert(pick);
            queue.push_back(pick);
            continue;
        };
        let nbrs = g.neighbors(u).to_vec();
        for &v in &nbrs {
            if observed_set.insert(v) {
                observed.push(v);
            }
        }
        entries.push((u, nbrs));
        queried.insert(u);
        if queried.len() >= target {
            break;
        }
        let mut fresh: Vec<u32> = g
            .neighbors(u)
            .iter()
            .copied()
            .filter(|v| !scheduled.contains(v))
            .collect();
        fresh.sort_unstable();
        fresh.dedup();
        let take = burn_count(rng, fresh.len());
        let (chosen, _) = fresh.partial_shuffle(rng, take);
        for &v in chosen.iter() {
            scheduled.insert(v);
            queue.push_back(v);
        }
    }
    Ok(SamplingList { entries })
}

/// Edge-induced sampled subgraph. Node ids are dense over the sampled node
/// set, assigned in ascending parent-graph id order; `to_parent` maps back.
#[derive(Debug, Clone)]
pub struct SampledSubgraph {
    pub graph: Multigraph,
    /// Per dense id: was the node queried (true) or merely visible (false)?
    pub queried: Vec<bool>,
    /// Dense subgraph id -> parent graph id.
    pub to_parent: Vec<u32>,
}

impl SampledSubgraph {
    /// The empty subgraph (used by generation paths that ignore the sample's
    /// structure).
    pub fn empty() -> Self {
        SampledSubgraph {
            graph: Multigraph::new(0),
            queried: Vec::new(),
            to_parent: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn queried_count(&self) -> usize {
        self.queried.iter().filter(|&&q| q).count()
    }

    pub fn queried_ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.graph.node_count() as u32).filter(|&i| self.queried[i as usize])
    }

    pub fn visible_ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.graph.node_count() as u32).filter(|&i| !self.queried[i as usize])
    }
}

/// Builds the subgraph induced from the union of the queried nodes' incident
/// edges. Each original edge appears once even if both endpoints were queried;
/// multiplicities recorded in the neighbor lists are preserved.
pub fn induced_subgraph(list: &SamplingList) -> Result<SampledSubgraph> {
    if list.is_empty() {
        return Err(Error::InvalidSamplingList("empty sampling list".into()));
    }

    // one record per distinct queried node (the graph is static, so repeats
    // carry identical lists)
    let mut record: std::collections::HashMap<u32, &Vec<u32>> = std::collections::HashMap::new();
    for (x, nbrs) in &list.entries {
        record.entry(*x).or_insert(nbrs);
    }

    let mut nodes: Vec<u32> = record.keys().copied().collect();
    for nbrs in record.values() {
        nodes.extend(nbrs.iter().copied());
    }
    nodes.sort_unstable();
    nodes.dedup();

    let mut dense: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
    for (i, &p) in nodes.iter().enumerate() {
        dense.insert(p, i as u32);
    }

    let mut graph = Multigraph::new(nodes.len());
    for (&x, nbrs) in &record {
        let du = dense[&x];
        let mut own_seen = 0usize;
        for &w in nbrs.iter() {
            if w == x {
                // loop endpoints come in pairs
                own_seen += 1;
                if own_seen.is_multiple_of(2) {
                    graph.add_edge(du, du);
                }
                continue;
            }
            if record.contains_key(&w) {
                // both endpoints queried: count the edge from the smaller
                // parent id only
                if x < w {
                    graph.add_edge(du, dense[&w]);
                }
            } else {
                graph.add_edge(du, dense[&w]);
            }
        }
    }

    let queried: Vec<bool> = nodes.iter().map(|p| record.contains_key(p)).collect();
    Ok(SampledSubgraph {
        graph,
        queried,
        to_parent: nodes,
    })
}
