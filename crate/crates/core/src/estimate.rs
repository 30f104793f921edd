//! Re-weighted random-walk estimators of local structural properties.
//!
//! All estimators consume only the sampling list: degrees come from the
//! recorded neighbor-list lengths and adjacency between sampled nodes comes
//! from the recorded lists themselves, so no extra queries are implied.
//!
//! The pair set `I = {(i, j) : M <= |i - j|}` over walk positions is quadratic
//! in the walk length. The sums over it factor through per-node position
//! lists and sliding windows, so everything here is near-linear in `r`; unit
//! tests check the fast forms against literal double loops.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::crawl::SamplingList;
use crate::error::{Error, Result};

/// Collision threshold used by the node-count estimator: `M = floor(0.025 r)`.
pub fn default_m(r: usize) -> usize {
    (0.025 * r as f64).floor() as usize
}

/// Estimates of the five local structural properties from one walk.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEstimates {
    pub n_hat: f64,
    pub k_avg_hat: f64,
    /// Largest degree observed along the walk.
    pub k_max: u32,
    pub p_k: BTreeMap<u32, f64>,
    /// Joint degree distribution, canonical keys `k <= k'`.
    pub p_kk: BTreeMap<(u32, u32), f64>,
    pub c_k: BTreeMap<u32, f64>,
    /// Degrees whose clustering estimate fell outside [0, 1] and was clamped.
    pub c_k_clamped: Vec<u32>,
}

impl LocalEstimates {
    pub fn p_at(&self, k: u32) -> f64 {
        self.p_k.get(&k).copied().unwrap_or(0.0)
    }

    /// Symmetric accessor into the joint degree distribution.
    pub fn p_kk_at(&self, k: u32, k2: u32) -> f64 {
        let key = (k.min(k2), k.max(k2));
        self.p_kk.get(&key).copied().unwrap_or(0.0)
    }

    /// Clustering estimate at degree `k`; `None` when the walk never visited
    /// a degree-`k` node (callers default that to zero).
    pub fn c_at(&self, k: u32) -> Option<f64> {
        if k == 1 {
            return Some(0.0);
        }
        self.c_k.get(&k).copied()
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let doc = EstimatesDoc::from(self);
        serde_json::to_writer_pretty(BufWriter::new(file), &doc)
            .map_err(|e| Error::InvalidEstimates(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<LocalEstimates> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let doc: EstimatesDoc = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| Error::InvalidEstimates(e.to_string()))?;
        doc.try_into()
    }
}

/// Versioned on-disk form with list-encoded maps.
#[derive(Debug, Serialize, Deserialize)]
struct EstimatesDoc {
    version: u32,
    n_hat: f64,
    k_avg_hat: f64,
    k_max: u32,
    p_k: Vec<(u32, f64)>,
    p_kk: Vec<(u32, u32, f64)>,
    c_k: Vec<(u32, f64)>,
    c_k_clamped: Vec<u32>,
}

impl From<&LocalEstimates> for EstimatesDoc {
    fn from(e: &LocalEstimates) -> Self {
        EstimatesDoc {
            version: 1,
            n_hat: e.n_hat,
            k_avg_hat: e.k_avg_hat,
            k_max: e.k_max,
            p_k: e.p_k.iter().map(|(&k, &v)| (k, v)).collect(),
            p_kk: e.p_kk.iter().map(|(&(a, b), &v)| (a, b, v)).collect(),
            c_k: e.c_k.iter().map(|(&k, &v)| (k, v)).collect(),
            c_k_clamped: e.c_k_clamped.clone(),
        }
    }
}

impl TryFrom<EstimatesDoc> for LocalEstimates {
    type Error = Error;

    fn try_from(d: EstimatesDoc) -> Result<LocalEstimates> {
        if d.version != 1 {
            return Err(Error::InvalidEstimates(format!(
                "unsupported version {}",
                d.version
            )));
        }
        Ok(LocalEstimates {
            n_hat: d.n_hat,
            k_avg_hat: d.k_avg_hat,
            k_max: d.k_max,
            p_k: d.p_k.into_iter().collect(),
            p_kk: d.p_kk.into_iter().map(|(a, b, v)| ((a, b), v)).collect(),
            c_k: d.c_k.into_iter().collect(),
            c_k_clamped: d.c_k_clamped,
        })
    }
}

/// Joint-degree estimate with its two ingredient estimators kept visible.
#[derive(Debug, Clone, PartialEq)]
pub struct JddEstimate {
    pub induced: BTreeMap<(u32, u32), f64>,
    pub traversed: BTreeMap<(u32, u32), f64>,
    pub hybrid: BTreeMap<(u32, u32), f64>,
}

/// Per-walk index: step node ids and degrees, per-node positions, and
/// per-node neighbor multiplicities taken from the recorded lists.
struct WalkIndex {
    order: Vec<u32>,
    degrees: Vec<u32>,
    positions: HashMap<u32, Vec<u32>>,
    multiplicity: HashMap<u32, HashMap<u32, u32>>,
}

impl WalkIndex {
    fn build(list: &SamplingList) -> Result<WalkIndex> {
        if list.is_empty() {
            return Err(Error::InvalidSamplingList("empty sampling list".into()));
        }
        let r = list.len();
        let mut order = Vec::with_capacity(r);
        let mut degrees = Vec::with_capacity(r);
        let mut positions: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut multiplicity: HashMap<u32, HashMap<u32, u32>> = HashMap::new();
        for (i, (x, nbrs)) in list.entries.iter().enumerate() {
            if nbrs.is_empty() {
                return Err(Error::InvalidSamplingList(format!(
                    "step {i}: node {x} recorded with degree 0"
                )));
            }
            order.push(*x);
            degrees.push(nbrs.len() as u32);
            positions.entry(*x).or_default().push(i as u32);
            multiplicity.entry(*x).or_insert_with(|| {
                let mut m = HashMap::new();
                for &w in nbrs {
                    *m.entry(w).or_insert(0u32) += 1;
                }
                m
            });
        }
        Ok(WalkIndex {
            order,
            degrees,
            positions,
            multiplicity,
        })
    }

    fn r(&self) -> usize {
        self.degrees.len()
    }

    /// `A[x][w]` read off the recorded list of `x` (which must be a walked
    /// node).
    fn adjacency(&self, x: u32, w: u32) -> u32 {
        self.multiplicity[&x].get(&w).copied().unwrap_or(0)
    }

    /// Number of ordered position pairs `(i, j)` with `|i - j| >= m`.
    fn pair_count(&self, m: usize) -> u64 {
        let r = self.r() as u64;
        if m == 0 {
            return r * r;
        }
        let m = m as u64;
        // pairs with |i-j| <= m-1: r on the diagonal plus 2(r-g) per gap g
        let t = (m - 1).min(r.saturating_sub(1));
        let near = r + 2 * (t * r - t * (t + 1) / 2);
        r * r - near
    }
}

fn check_walk_length(r: usize, m: usize) -> Result<()> {
    if r < 2 * m + 2 {
        return Err(Error::WalkTooShort { r, m });
    }
    Ok(())
}

/// Estimator of the number of nodes: degree-ratio sum over far-apart position
/// pairs divided by the collision count over the same pairs.
pub fn estimate_num_nodes(list: &SamplingList, m: usize) -> Result<f64> {
    let idx = WalkIndex::build(list)?;
    num_nodes_from_index(&idx, m)
}

fn num_nodes_from_index(idx: &WalkIndex, m: usize) -> Result<f64> {
    let r = idx.r();
    check_walk_length(r, m)?;

    let inv: Vec<f64> = idx.degrees.iter().map(|&d| 1.0 / d as f64).collect();
    let sum_d: f64 = idx.degrees.iter().map(|&d| d as f64).sum();
    let sum_inv: f64 = inv.iter().sum();

    // numerator over |i-j| >= m: full ordered sum minus the near band
    let mut numerator = sum_d * sum_inv;
    if m >= 1 {
        let mut prefix = Vec::with_capacity(r + 1);
        prefix.push(0.0f64);
        for v in &inv {
            prefix.push(prefix.last().unwrap() + v);
        }
        let mut band = 0.0f64;
        for i in 0..r {
            let lo = i.saturating_sub(m - 1);
            let hi = (i + m).min(r);
            band += idx.degrees[i] as f64 * (prefix[hi] - prefix[lo]);
        }
        numerator -= band;
    }

    let mut collisions: u64 = 0;
    for ps in idx.positions.values() {
        let c = ps.len();
        if m == 0 {
            collisions += (c * c) as u64;
            continue;
        }
        let mut b = 0usize;
        let mut far = 0u64;
        for a in 0..c {
            if b < a + 1 {
                b = a + 1;
            }
            while b < c && (ps[b] - ps[a]) < m as u32 {
                b += 1;
            }
            far += (c - b) as u64;
        }
        collisions += 2 * far;
    }

    if collisions == 0 {
        return Err(Error::InsufficientCollisions);
    }
    Ok(numerator / collisions as f64)
}

/// Estimator of the average degree: harmonic mean of the visited degrees.
pub fn estimate_avg_degree(list: &SamplingList) -> Result<f64> {
    let idx = WalkIndex::build(list)?;
    Ok(avg_degree_from_index(&idx))
}

fn avg_degree_from_index(idx: &WalkIndex) -> f64 {
    let r = idx.r() as f64;
    let phi_bar: f64 = idx.degrees.iter().map(|&d| 1.0 / d as f64).sum::<f64>() / r;
    1.0 / phi_bar
}

/// Estimator of the degree distribution.
pub fn estimate_degree_dist(list: &SamplingList) -> Result<BTreeMap<u32, f64>> {
    let idx = WalkIndex::build(list)?;
    Ok(degree_dist_from_index(&idx))
}

fn degree_counts(idx: &WalkIndex) -> BTreeMap<u32, u64> {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &d in &idx.degrees {
        *counts.entry(d).or_insert(0) += 1;
    }
    counts
}

fn degree_dist_from_index(idx: &WalkIndex) -> BTreeMap<u32, f64> {
    let r = idx.r() as f64;
    let phi_bar: f64 = idx.degrees.iter().map(|&d| 1.0 / d as f64).sum::<f64>() / r;
    degree_counts(idx)
        .into_iter()
        .map(|(k, cnt)| (k, cnt as f64 / (k as f64 * r) / phi_bar))
        .collect()
}

/// Hybrid joint-degree-distribution estimator: induced-edge form for degree
/// pairs with `k + k' >= 2 * k_avg_hat`, traversed-edge form below it.
pub fn estimate_jdd(list: &SamplingList, m: usize) -> Result<JddEstimate> {
    let idx = WalkIndex::build(list)?;
    jdd_from_index(&idx, m)
}

fn jdd_from_index(idx: &WalkIndex, m: usize) -> Result<JddEstimate> {
    let r = idx.r();
    let n_hat = num_nodes_from_index(idx, m)?;
    let k_avg_hat = avg_degree_from_index(idx);

    // induced edges: for each step i and each distinct recorded neighbor w of
    // x_i, every far-apart position of w contributes A[x_i][w]
    let mut ie_counts: HashMap<(u32, u32), u64> = HashMap::new();
    for i in 0..r {
        let x = idx.order[i];
        let d_i = idx.degrees[i];
        for (&w, &a) in &idx.multiplicity[&x] {
            let Some(ps) = idx.positions.get(&w) else {
                continue;
            };
            let far = if m == 0 {
                ps.len() as u64
            } else {
                let lo = (i as u32).saturating_sub(m as u32 - 1);
                let hi = i as u32 + m as u32; // exclusive
                let lo_idx = ps.partition_point(|&p| p < lo);
                let hi_idx = ps.partition_point(|&p| p < hi);
                (ps.len() - (hi_idx - lo_idx)) as u64
            };
            if far > 0 {
                let d_w = degree_of_walked(idx, w);
                *ie_counts.entry((d_i, d_w)).or_insert(0) += a as u64 * far;
            }
        }
    }
    let pairs = idx.pair_count(m) as f64;
    let mut induced: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (&(k, k2), &cnt) in ie_counts.iter() {
        if k > k2 {
            continue; // symmetric sum, keep canonical keys
        }
        let phi = cnt as f64 / (k as f64 * k2 as f64 * pairs);
        let v = n_hat * k_avg_hat * phi;
        if v > 0.0 {
            induced.insert((k, k2), v);
        }
    }

    // traversed edges: each step fires the (k, k') and (k', k) indicators,
    // which land on the same canonical key only for equal degrees
    let mut te_counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for i in 0..r - 1 {
        let a = idx.degrees[i];
        let b = idx.degrees[i + 1];
        let hits = if a == b { 2 } else { 1 };
        *te_counts.entry((a.min(b), a.max(b))).or_insert(0) += hits;
    }
    let traversed: BTreeMap<(u32, u32), f64> = te_counts
        .into_iter()
        .map(|(key, cnt)| (key, cnt as f64 / (2.0 * (r as f64 - 1.0))))
        .collect();

    let mut hybrid: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut keys: Vec<(u32, u32)> = induced.keys().chain(traversed.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    for key in keys {
        let (k, k2) = key;
        let v = if (k + k2) as f64 >= 2.0 * k_avg_hat {
            induced.get(&key).copied().unwrap_or(0.0)
        } else {
            traversed.get(&key).copied().unwrap_or(0.0)
        };
        if v > 0.0 {
            hybrid.insert(key, v);
        }
    }

    Ok(JddEstimate {
        induced,
        traversed,
        hybrid,
    })
}

fn degree_of_walked(idx: &WalkIndex, w: u32) -> u32 {
    idx.multiplicity[&w].values().sum::<u32>()
}

/// Estimator of the degree-dependent clustering coefficient. Values are
/// clamped into [0, 1]; the returned list records which degrees were clamped.
pub fn estimate_ddcc(list: &SamplingList) -> Result<(BTreeMap<u32, f64>, Vec<u32>)> {
    let idx = WalkIndex::build(list)?;
    ddcc_from_index(&idx)
}

fn ddcc_from_index(idx: &WalkIndex) -> Result<(BTreeMap<u32, f64>, Vec<u32>)> {
    let r = idx.r();
    if r < 3 {
        return Err(Error::InvalidSamplingList(format!(
            "clustering estimator needs r >= 3, got {r}"
        )));
    }
    let mut closure: BTreeMap<u32, u64> = BTreeMap::new();
    for i in 1..r - 1 {
        let k = idx.degrees[i];
        let prev = idx.order[i - 1];
        let next = idx.order[i + 1];
        let a = idx.adjacency(prev, next);
        if a > 0 {
            *closure.entry(k).or_insert(0) += a as u64;
        }
    }
    let counts = degree_counts(idx);
    let mut c_k = BTreeMap::new();
    let mut clamped = Vec::new();
    for (&k, &cnt_k) in &counts {
        if k < 2 {
            c_k.insert(k, 0.0);
            continue;
        }
        let acc = closure.get(&k).copied().unwrap_or(0) as f64;
        // phi_c(k) / phi(k) with phi_c over interior steps and phi over all
        let phi_c = acc / ((k as f64 - 1.0) * (r as f64 - 2.0));
        let phi = cnt_k as f64 / (k as f64 * r as f64);
        let mut v = phi_c / phi;
        if !(0.0..=1.0).contains(&v) {
            clamped.push(k);
            v = v.clamp(0.0, 1.0);
        }
        c_k.insert(k, v);
    }
    Ok((c_k, clamped))
}

/// Runs all five estimators over one walk. `m` defaults to `floor(0.025 r)`.
pub fn estimate_all(list: &SamplingList, m: Option<usize>) -> Result<LocalEstimates> {
    let idx = WalkIndex::build(list)?;
    let m = m.unwrap_or_else(|| default_m(idx.r()));
    let n_hat = num_nodes_from_index(&idx, m)?;
    let k_avg_hat = avg_degree_from_index(&idx);
    let p_k = degree_dist_from_index(&idx);
    let jdd = jdd_from_index(&idx, m)?;
    let (c_k, c_k_clamped) = ddcc_from_index(&idx)?;
    let k_max = idx.degrees.iter().copied().max().unwrap_or(0);
    Ok(LocalEstimates {
        n_hat,
        k_avg_hat,
        k_max,
        p_k,
        p_kk: jdd.hybrid,
        c_k,
        c_k_clamped,
    })
}
