//! Undirected multigraph with dense node ids.
//!
//! Multiple edges and self-loops are allowed. Adjacency is stored per node as
//! the multiset of incident edge endpoints, so a self-loop contributes the
//! node's own id twice. With that convention `degree(i)` is just the length of
//! the incidence list, the handshake identity `sum(degree) = 2m` holds, and
//! `A[i][i]` equals twice the loop count.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Multigraph {
    adj: Vec<Vec<u32>>,
    edge_count: usize,
    /// Original labels from the source file, when the graph was loaded or
    /// derived from one (index = dense id).
    labels: Option<Vec<u64>>,
}

impl Multigraph {
    pub fn new(n: usize) -> Self {
        Multigraph {
            adj: vec![Vec::new(); n],
            edge_count: 0,
            labels: None,
        }
    }

    /// Builds a graph from a list of edges over ids `0..n-1`.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut g = Multigraph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<u64>) {
        assert_eq!(labels.len(), self.adj.len());
        self.labels = Some(labels);
    }

    pub fn check_node(&self, i: u32) -> Result<()> {
        if (i as usize) < self.adj.len() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                id: i,
                n: self.adj.len(),
            })
        }
    }

    /// Adds one node and returns its id.
    pub fn add_node(&mut self) -> u32 {
        self.adj.push(Vec::new());
        (self.adj.len() - 1) as u32
    }

    /// Adds one edge instance. A self-loop pushes the node's id twice.
    pub fn add_edge(&mut self, u: u32, v: u32) {
        debug_assert!((u as usize) < self.adj.len() && (v as usize) < self.adj.len());
        if u == v {
            self.adj[u as usize].push(u);
            self.adj[u as usize].push(u);
        } else {
            self.adj[u as usize].push(v);
            self.adj[v as usize].push(u);
        }
        self.edge_count += 1;
    }

    /// Removes one edge instance between `u` and `v`. Panics if absent:
    /// callers track instances explicitly, so a miss is a logic error.
    pub fn remove_edge(&mut self, u: u32, v: u32) {
        if u == v {
            let list = &mut self.adj[u as usize];
            for _ in 0..2 {
                let pos = list
                    .iter()
                    .position(|&w| w == u)
                    .expect("remove_edge: loop instance not present");
                list.swap_remove(pos);
            }
        } else {
            let pos_v = self.adj[u as usize]
                .iter()
                .position(|&w| w == v)
                .expect("remove_edge: edge instance not present");
            self.adj[u as usize].swap_remove(pos_v);
            let pos_u = self.adj[v as usize]
                .iter()
                .position(|&w| w == u)
                .expect("remove_edge: edge instance not present");
            self.adj[v as usize].swap_remove(pos_u);
        }
        self.edge_count -= 1;
    }

    /// Degree of `i`; a self-loop contributes 2.
    pub fn degree(&self, i: u32) -> usize {
        self.adj[i as usize].len()
    }

    /// Incident edge endpoints of `i` (multiset; a loop lists `i` twice).
    pub fn neighbors(&self, i: u32) -> &[u32] {
        &self.adj[i as usize]
    }

    /// `A[i][j]`: edge multiplicity for `i != j`, twice the loop count for
    /// `i == j`. Scans the shorter incidence list.
    pub fn multiplicity(&self, i: u32, j: u32) -> usize {
        let (a, b) = if self.degree(i) <= self.degree(j) {
            (i, j)
        } else {
            (j, i)
        };
        self.adj[a as usize].iter().filter(|&&w| w == b).count()
    }

    /// Iterates edge instances as `(u, v)` with `u <= v`; each loop yields one
    /// `(u, u)` pair.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            let mut own_seen = 0usize;
            list.iter().filter_map(move |&v| {
                if v > u {
                    Some((u, v))
                } else if v == u {
                    own_seen += 1;
                    // endpoints of a loop come in pairs; emit once per pair
                    if own_seen.is_multiple_of(2) {
                        Some((u, u))
                    } else {
                        None
                    }
                } else {
                    None
                }
            })
        })
    }

    /// Sorted edge-instance multiset; useful for equality checks.
    pub fn edge_multiset(&self) -> Vec<(u32, u32)> {
        let mut edges: Vec<_> = self.edges().collect();
        edges.sort_unstable();
        edges
    }

    /// Per-degree node counts `n(k)`, including `k = 0` when present.
    pub fn degree_counts(&self) -> HashMap<u32, u64> {
        let mut counts = HashMap::new();
        for list in &self.adj {
            *counts.entry(list.len() as u32).or_insert(0u64) += 1;
        }
        counts
    }

    /// Connected components as node-id lists (BFS; multi-edges and loops do
    /// not affect reachability).
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start as u32);
            let mut comp = vec![start as u32];
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u as usize] {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Writes one `u v` line per edge instance (dense ids).
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", u, v).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Graphviz DOT export for external visualization tools.
    pub fn write_dot(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "graph g {{").map_err(|e| Error::io(path, e))?;
        for (u, v) in self.edges() {
            writeln!(w, "  {} -- {};", u, v).map_err(|e| Error::io(path, e))?;
        }
        writeln!(w, "}}").map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Loads a whitespace-separated edge list. Lines starting with `#` or `%` are
/// comments. Node ids are remapped to dense `0..n-1` in ascending label
/// order, which makes reloading a stored graph the identity mapping; the
/// original labels stay available through [`Multigraph::labels`]. Duplicate
/// lines and both-direction listings are kept as distinct edge instances.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Multigraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::MalformedLine {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected exactly two integers, got {:?}", trimmed),
            });
        };
        let parse = |tok: &str| -> Result<u64> {
            tok.parse::<u64>().map_err(|_| Error::MalformedLine {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("not a non-negative integer: {:?}", tok),
            })
        };
        raw_edges.push((parse(a)?, parse(b)?));
    }

    let mut labels: Vec<u64> = raw_edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    labels.sort_unstable();
    labels.dedup();
    let id_of: HashMap<u64, u32> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i as u32))
        .collect();

    let mut g = Multigraph::new(labels.len());
    for (a, b) in raw_edges {
        g.add_edge(id_of[&a], id_of[&b]);
    }
    g.set_labels(labels);
    Ok(g)
}

/// Simplifies the graph (drops loops and collapses multi-edges), then keeps
/// only the largest connected component, relabeled to dense ids in ascending
/// input-id order. Ties between equal-size components go to the one containing
/// the smallest input node id.
pub fn preprocess(g: &Multigraph) -> Result<Multigraph> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }

    // simple undirected version
    let n = g.node_count();
    let mut simple = Multigraph::new(n);
    let mut seen: HashMap<(u32, u32), ()> = HashMap::new();
    for (u, v) in g.edges() {
        if u == v {
            continue;
        }
        if seen.insert((u, v), ()).is_none() {
            simple.add_edge(u, v);
        }
    }

    let mut components = simple.components();
    for comp in &mut components {
        comp.sort_unstable();
    }
    let best = components
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .expect("nonempty graph has at least one component");

    let mut dense = vec![u32::MAX; n];
    for (new_id, &old_id) in best.iter().enumerate() {
        dense[old_id as usize] = new_id as u32;
    }

    let mut out = Multigraph::new(best.len());
    for (u, v) in simple.edges() {
        if dense[u as usize] != u32::MAX && dense[v as usize] != u32::MAX {
            out.add_edge(dense[u as usize], dense[v as usize]);
        }
    }
    if let Some(labels) = g.labels() {
        out.set_labels(best.iter().map(|&old| labels[old as usize]).collect());
    }
    Ok(out)
}
