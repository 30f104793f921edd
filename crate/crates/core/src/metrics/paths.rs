//! Exact all-pairs shortest-path statistics and betweenness on the largest
//! connected component.
//!
//! Per-source BFS with Brandes dependency accumulation. Sources are processed
//! in fixed-size chunks distributed over the thread pool and merged in chunk
//! order, so results are bit-identical regardless of worker count.
//! Multi-edges collapse to single adjacency (path lengths and counts ignore
//! multiplicity) and loops are ignored.

use rayon::prelude::*;

use crate::graph::Multigraph;

const SOURCE_CHUNK: usize = 256;

/// Shortest-path statistics of one graph's LCC.
#[derive(Debug, Clone, Default)]
pub struct PathMetrics {
    /// Average shortest-path length; `None` when the LCC has < 2 nodes.
    pub l_avg: Option<f64>,
    /// Shortest-path length distribution over unordered reachable pairs.
    pub p_l: std::collections::BTreeMap<u32, f64>,
    pub l_max: Option<u32>,
    /// Mean betweenness per degree class (ordered-pair convention: each
    /// unordered pair contributes to both directions).
    pub b_k: std::collections::BTreeMap<u32, f64>,
    /// Number of nodes in the LCC.
    pub lcc_nodes: usize,
}

struct ChunkAccum {
    dist_sum: u64,
    dist_hist: Vec<u64>,
    l_max: u32,
    betweenness: Vec<f64>,
}

/// Largest component's nodes (ties to the one containing the smallest id).
fn largest_component(g: &Multigraph) -> Vec<u32> {
    let mut comps = g.components();
    for c in &mut comps {
        c.sort_unstable();
    }
    comps
        .into_iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .unwrap_or_default()
}

pub fn compute_paths(g: &Multigraph) -> PathMetrics {
    let lcc = largest_component(g);
    let n = lcc.len();
    if n < 2 {
        return PathMetrics {
            lcc_nodes: n,
            ..Default::default()
        };
    }

    // simple adjacency over dense LCC ids
    let mut dense = vec![u32::MAX; g.node_count()];
    for (i, &p) in lcc.iter().enumerate() {
        dense[p as usize] = i as u32;
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, &p) in lcc.iter().enumerate() {
        let mut nbrs: Vec<u32> = g
            .neighbors(p)
            .iter()
            .filter(|&&w| w != p)
            .map(|&w| dense[w as usize])
            .collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        adj[i] = nbrs;
    }

    let chunks: Vec<(usize, usize)> = (0..n)
        .step_by(SOURCE_CHUNK)
        .map(|start| (start, (start + SOURCE_CHUNK).min(n)))
        .collect();

    let per_chunk: Vec<ChunkAccum> = chunks
        .par_iter()
        .map(|&(start, end)| {
            let mut acc = ChunkAccum {
                dist_sum: 0,
                dist_hist: Vec::new(),
                l_max: 0,
                betweenness: vec![0.0; n],
            };
            let mut dist = vec![-1i32; n];
            let mut sigma = vec![0.0f64; n];
            let mut delta = vec![0.0f64; n];
            let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
            let mut order: Vec<u32> = Vec::with_capacity(n);
            let mut queue = std::collections::VecDeque::new();

            for s in start..end {
                for v in 0..n {
                    dist[v] = -1;
                    sigma[v] = 0.0;
                    delta[v] = 0.0;
                    preds[v].clear();
                }
                order.clear();
                dist[s] = 0;
                sigma[s] = 1.0;
                queue.push_back(s as u32);
                while let Some(v) = queue.pop_front() {
                    order.push(v);
                    let dv = dist[v as usize];
                    for &w in &adj[v as usize] {
                        if dist[w as usize] < 0 {
                            dist[w as usize] = dv + 1;
                            queue.push_back(w);
                        }
                        if dist[w as usize] == dv + 1 {
                            sigma[w as usize] += sigma[v as usize];
                            preds[w as usize].push(v);
                        }
                    }
                }
                for &v in order.iter().skip(1) {
                    let d = dist[v as usize] as u32;
                    acc.dist_sum += d as u64;
                    if acc.dist_hist.len() <= d as usize {
                        acc.dist_hist.resize(d as usize + 1, 0);
                    }
                    acc.dist_hist[d as usize] += 1;
                    acc.l_max = acc.l_max.max(d);
                }
                // dependency accumulation in reverse BFS order
                for &v in order.iter().rev() {
                    for &u in &preds[v as usize] {
                        delta[u as usize] +=
                            sigma[u as usize] / sigma[v as usize] * (1.0 + delta[v as usize]);
                    }
                    if v as usize != s {
                        acc.betweenness[v as usize] += delta[v as usize];
                    }
                }
            }
            acc
        })
        .collect();

    let mut dist_sum = 0u64;
    let mut dist_hist: Vec<u64> = Vec::new();
    let mut l_max = 0u32;
    let mut betweenness = vec![0.0f64; n];
    for acc in per_chunk {
        dist_sum += acc.dist_sum;
        if dist_hist.len() < acc.dist_hist.len() {
            dist_hist.resize(acc.dist_hist.len(), 0);
        }
        for (d, cnt) in acc.dist_hist.iter().enumerate() {
            dist_hist[d] += cnt;
        }
        l_max = l_max.max(acc.l_max);
        for (v, b) in acc.betweenness.iter().enumerate() {
            betweenness[v] += b;
        }
    }

    let ordered_pairs = (n as u64) * (n as u64 - 1);
    let l_avg = dist_sum as f64 / ordered_pairs as f64;
    let p_l = dist_hist
        .iter()
        .enumerate()
        .filter(|&(d, &cnt)| d > 0 && cnt > 0)
        .map(|(d, &cnt)| (d as u32, cnt as f64 / ordered_pairs as f64))
        .collect();

    // betweenness per degree class; members of a component keep their full
    // multigraph degree
    let mut class_sum: std::collections::BTreeMap<u32, (f64, u64)> =
        std::collections::BTreeMap::new();
    for (i, &p) in lcc.iter().enumerate() {
        let k = g.degree(p) as u32;
        let e = class_sum.entry(k).or_insert((0.0, 0));
        e.0 += betweenness[i];
        e.1 += 1;
    }
    let b_k = class_sum
        .into_iter()
        .map(|(k, (sum, cnt))| (k, sum / cnt as f64))
        .collect();

    PathMetrics {
        l_avg: Some(l_avg),
        p_l,
        l_max: Some(l_max),
        b_k,
        lcc_nodes: n,
    }
}
