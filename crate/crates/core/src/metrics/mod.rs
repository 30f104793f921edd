//! The twelve structural properties and the normalized L1 accuracy measure.
//!
//! Local properties (1-7) use the full multigraph with multiplicity-aware
//! formulas; shortest-path properties (8-11) are computed exactly on the
//! largest connected component; (12) is the adjacency spectral radius.

pub mod paths;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Multigraph;

pub use paths::{compute_paths, PathMetrics};

pub const PROPERTY_KEYS: [&str; 12] = [
    "n", "k_avg", "p_k", "k_nn_k", "c_avg", "c_k", "p_s", "l_avg", "p_l", "l_max", "b_k",
    "lambda_1",
];

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PropertyReport {
    pub n: u64,
    pub k_avg: f64,
    pub p_k: BTreeMap<u32, f64>,
    pub k_nn_k: BTreeMap<u32, f64>,
    pub c_avg: f64,
    pub c_k: BTreeMap<u32, f64>,
    pub p_s: BTreeMap<u32, f64>,
    pub l_avg: Option<f64>,
    pub p_l: BTreeMap<u32, f64>,
    pub l_max: Option<u32>,
    pub b_k: BTreeMap<u32, f64>,
    pub lambda_1: f64,
}

impl PropertyReport {
    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(BufWriter::new(file), self)
            .map_err(|e| Error::InvalidEstimates(e.to_string()))
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<PropertyReport> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::InvalidEstimates(e.to_string()))
    }

    /// One row per property: scalars carry their value, distributions their
    /// support size (full distributions live in the JSON document and the
    /// two-column tables).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("property,kind,value\n");
        out.push_str(&format!("n,scalar,{}\n", self.n));
        out.push_str(&format!("k_avg,scalar,{}\n", self.k_avg));
        out.push_str(&format!("p_k,distribution,{}\n", self.p_k.len()));
        out.push_str(&format!("k_nn_k,distribution,{}\n", self.k_nn_k.len()));
        out.push_str(&format!("c_avg,scalar,{}\n", self.c_avg));
        out.push_str(&format!("c_k,distribution,{}\n", self.c_k.len()));
        out.push_str(&format!("p_s,distribution,{}\n", self.p_s.len()));
        match self.l_avg {
            Some(v) => out.push_str(&format!("l_avg,scalar,{v}\n")),
            None => out.push_str("l_avg,scalar,\n"),
        }
        out.push_str(&format!("p_l,distribution,{}\n", self.p_l.len()));
        match self.l_max {
            Some(v) => out.push_str(&format!("l_max,scalar,{v}\n")),
            None => out.push_str("l_max,scalar,\n"),
        }
        out.push_str(&format!("b_k,distribution,{}\n", self.b_k.len()));
        out.push_str(&format!("lambda_1,scalar,{}\n", self.lambda_1));
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    /// Writes each distribution-valued property as a two-column table
    /// `<prefix>.<name>.tsv` for plotting.
    pub fn write_distribution_tables(&self, prefix: impl AsRef<Path>) -> Result<()> {
        let prefix = prefix.as_ref();
        let dump = |name: &str, map: &BTreeMap<u32, f64>| -> Result<()> {
            let path = prefix.with_extension(format!("{name}.tsv"));
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(file);
            for (k, v) in map {
                writeln!(w, "{k}\t{v}").map_err(|e| Error::io(&path, e))?;
            }
            Ok(())
        };
        dump("p_k", &self.p_k)?;
        dump("k_nn_k", &self.k_nn_k)?;
        dump("c_k", &self.c_k)?;
        dump("p_s", &self.p_s)?;
        dump("p_l", &self.p_l)?;
        dump("b_k", &self.b_k)
    }
}

/// Local structural properties: `n`, average degree, degree distribution,
/// neighbor connectivity, clustering (network-wide and degree-dependent), and
/// the edgewise shared-partner distribution.
#[derive(Debug, Clone, Default)]
pub struct LocalMetrics {
    pub n: u64,
    pub k_avg: f64,
    pub p_k: BTreeMap<u32, f64>,
    pub k_nn_k: BTreeMap<u32, f64>,
    pub c_avg: f64,
    pub c_k: BTreeMap<u32, f64>,
    pub p_s: BTreeMap<u32, f64>,
}

/// Triangle membership count per node, with edge multiplicities multiplied
/// through (`t_i = sum_{j<l} A_ij A_il A_jl`; loops never participate).
pub fn triangle_counts(g: &Multigraph) -> Vec<i64> {
    let n = g.node_count();
    let mut mult: std::collections::HashMap<(u32, u32), u32> = std::collections::HashMap::new();
    for (u, v) in g.edges() {
        if u != v {
            *mult.entry((u, v)).or_insert(0) += 1;
        }
    }
    let lookup =
        |a: u32, b: u32| -> i64 { mult.get(&(a.min(b), a.max(b))).copied().unwrap_or(0) as i64 };
    let mut t = vec![0i64; n];
    let mut local: Vec<(u32, i64)> = Vec::new();
    for u in 0..n as u32 {
        local.clear();
        {
            let mut m: std::collections::HashMap<u32, i64> = std::collections::HashMap::new();
            for &w in g.neighbors(u) {
                if w != u {
                    *m.entry(w).or_insert(0) += 1;
                }
            }
            local.extend(m);
        }
        let mut acc = 0i64;
        for i in 0..local.len() {
            for j in (i + 1)..local.len() {
                let a_jl = lookup(local[i].0, local[j].0);
                if a_jl > 0 {
                    acc += local[i].1 * local[j].1 * a_jl;
                }
            }
        }
        t[u as usize] = acc;
    }
    t
}

pub fn compute_local(g: &Multigraph) -> Result<LocalMetrics> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let m = g.edge_count();
    let k_avg = 2.0 * m as f64 / n as f64;

    let mut class_count: BTreeMap<u32, u64> = BTreeMap::new();
    for i in 0..n as u32 {
        *class_count.entry(g.degree(i) as u32).or_insert(0) += 1;
    }
    let p_k: BTreeMap<u32, f64> = class_count
        .iter()
        .map(|(&k, &c)| (k, c as f64 / n as f64))
        .collect();

    // neighbor connectivity: instance iteration realizes sum_j A_ij d_j
    let mut knn_sum: BTreeMap<u32, f64> = BTreeMap::new();
    for i in 0..n as u32 {
        let k = g.degree(i) as u32;
        if k == 0 {
            continue;
        }
        let s: u64 = g.neighbors(i).iter().map(|&w| g.degree(w) as u64).sum();
        *knn_sum.entry(k).or_insert(0.0) += s as f64 / k as f64;
    }
    let k_nn_k: BTreeMap<u32, f64> = knn_sum
        .into_iter()
        .map(|(k, sum)| (k, sum / class_count[&k] as f64))
        .collect();

    let t = triangle_counts(g);
    let mut c_total = 0.0f64;
    let mut c_class: BTreeMap<u32, f64> = BTreeMap::new();
    for (i, &t_i) in t.iter().enumerate() {
        let k = g.degree(i as u32) as u32;
        let local = if k >= 2 {
            2.0 * t_i as f64 / (k as f64 * (k as f64 - 1.0))
        } else {
            0.0
        };
        c_total += local;
        *c_class.entry(k).or_insert(0.0) += local;
    }
    let c_avg = c_total / n as f64;
    let c_k: BTreeMap<u32, f64> = c_class
        .into_iter()
        .map(|(k, sum)| (k, sum / class_count[&k] as f64))
        .collect();

    // shared partners per distinct non-loop pair, weighted by multiplicity
    let mut pair_mult: std::collections::HashMap<(u32, u32), u64> =
        std::collections::HashMap::new();
    for (u, v) in g.edges() {
        if u != v {
            *pair_mult.entry((u, v)).or_insert(0) += 1;
        }
    }
    let adjacency = |a: u32, b: u32| -> u64 {
        if a == b {
            return 0;
        }
        g.multiplicity(a, b) as u64
    };
    let mut s_hist: BTreeMap<u32, u64> = BTreeMap::new();
    let mut counted_instances = 0u64;
    for (&(u, v), &c) in &pair_mult {
        let (side, other) = if g.degree(u) <= g.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        let mut sp = 0u64;
        for &w in g.neighbors(side) {
            if w != u && w != v {
                sp += adjacency(other, w);
            }
        }
        *s_hist.entry(sp as u32).or_insert(0) += c;
        counted_instances += c;
    }
    let p_s: BTreeMap<u32, f64> = if counted_instances > 0 {
        s_hist
            .into_iter()
            .map(|(s, c)| (s, c as f64 / counted_instances as f64))
            .collect()
    } else {
        BTreeMap::new()
    };

    Ok(LocalMetrics {
        n: n as u64,
        k_avg,
        p_k,
        k_nn_k,
        c_avg,
        c_k,
        p_s,
    })
}

/// Spectral radius of the adjacency matrix by shifted power iteration
/// (`A + I` keeps the dominant eigenvalue strictly separated on bipartite
/// graphs) with a deterministic all-ones start.
pub fn largest_eigenvalue(g: &Multigraph, tol: f64) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    const MAX_ITER: usize = 100_000;
    let mut x = vec![1.0f64 / (n as f64).sqrt(); n];
    let mut y = vec![0.0f64; n];
    let mut prev = f64::INFINITY;
    for iter in 0..MAX_ITER {
        for u in 0..n {
            let mut acc = x[u];
            for &w in g.neighbors(u as u32) {
                acc += x[w as usize];
            }
            y[u] = acc;
        }
        let lambda: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(-1.0); // A = -I has no nonzero image; unreachable for A+I
        }
        for (xv, yv) in x.iter_mut().zip(&y) {
            *xv = yv / norm;
        }
        if (lambda - prev).abs() <= tol * lambda.abs().max(1.0) && iter > 0 {
            return Ok(lambda - 1.0);
        }
        prev = lambda;
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITER,
        last: prev - 1.0,
    })
}

/// All twelve properties of one graph.
pub fn full_report(g: &Multigraph, eig_tol: f64) -> Result<PropertyReport> {
    let local = compute_local(g)?;
    let paths = compute_paths(g);
    let lambda_1 = largest_eigenvalue(g, eig_tol)?;
    Ok(PropertyReport {
        n: local.n,
        k_avg: local.k_avg,
        p_k: local.p_k,
        k_nn_k: local.k_nn_k,
        c_avg: local.c_avg,
        c_k: local.c_k,
        p_s: local.p_s,
        l_avg: paths.l_avg,
        p_l: paths.p_l,
        l_max: paths.l_max,
        b_k: paths.b_k,
        lambda_1,
    })
}

/// Normalized L1 distances between an original and a generated report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct L1Report {
    /// One `(property, distance)` entry per property, in fixed order.
    pub per_property: Vec<(String, f64)>,
    pub average: f64,
    pub sd: f64,
    /// Properties whose original mass was zero against nonzero generated
    /// mass; their distance is infinite.
    pub infinite: Vec<String>,
}

fn scalar_distance(orig: f64, gen: f64) -> f64 {
    if orig == 0.0 {
        if gen == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (gen - orig).abs() / orig.abs()
    }
}

fn map_distance(orig: &BTreeMap<u32, f64>, gen: &BTreeMap<u32, f64>) -> f64 {
    let mut keys: Vec<u32> = orig.keys().chain(gen.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut num = 0.0;
    let mut den = 0.0;
    for k in keys {
        let o = orig.get(&k).copied().unwrap_or(0.0);
        let g = gen.get(&k).copied().unwrap_or(0.0);
        num += (g - o).abs();
        den += o;
    }
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

fn option_scalar_distance(orig: Option<f64>, gen: Option<f64>) -> f64 {
    scalar_distance(orig.unwrap_or(0.0), gen.unwrap_or(0.0))
}

pub fn l1_distance(orig: &PropertyReport, gen: &PropertyReport) -> L1Report {
    let per_property: Vec<(String, f64)> = vec![
        ("n".into(), scalar_distance(orig.n as f64, gen.n as f64)),
        ("k_avg".into(), scalar_distance(orig.k_avg, gen.k_avg)),
        ("p_k".into(), map_distance(&orig.p_k, &gen.p_k)),
        ("k_nn_k".into(), map_distance(&orig.k_nn_k, &gen.k_nn_k)),
        ("c_avg".into(), scalar_distance(orig.c_avg, gen.c_avg)),
        ("c_k".into(), map_distance(&orig.c_k, &gen.c_k)),
        ("p_s".into(), map_distance(&orig.p_s, &gen.p_s)),
        (
            "l_avg".into(),
            option_scalar_distance(orig.l_avg, gen.l_avg),
        ),
        ("p_l".into(), map_distance(&orig.p_l, &gen.p_l)),
        (
            "l_max".into(),
            option_scalar_distance(orig.l_max.map(|v| v as f64), gen.l_max.map(|v| v as f64)),
        ),
        ("b_k".into(), map_distance(&orig.b_k, &gen.b_k)),
        (
            "lambda_1".into(),
            scalar_distance(orig.lambda_1, gen.lambda_1),
        ),
    ];
    let infinite: Vec<String> = per_property
        .iter()
        .filter(|(_, d)| d.is_infinite())
        .map(|(k, _)| k.clone())
        .collect();
    let k = per_property.len() as f64;
    let average = per_property.iter().map(|(_, d)| d).sum::<f64>() / k;
    let sd = (per_property
        .iter()
        .map(|(_, d)| (d - average) * (d - average))
        .sum::<f64>()
        / k)
        .sqrt();
    L1Report {
        per_property,
        average,
        sd,
        infinite,
    }
}

impl L1Report {
    pub fn distance(&self, key: &str) -> Option<f64> {
        self.per_property
            .iter()
            .find(|(k, _)| k == key)
            .map(|&(_, d)| d)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("property,l1_distance\n");
        for (k, d) in &self.per_property {
            out.push_str(&format!("{k},{d}\n"));
        }
        out.push_str(&format!("average,{}\n", self.average));
        out.push_str(&format!("sd,{}\n", self.sd));
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}
