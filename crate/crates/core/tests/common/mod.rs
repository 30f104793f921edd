//! Shared test machinery: dense-matrix reference implementations of every
//! structural property (independent of the library's code paths), exact
//! property formulas for estimator oracles, seeded random graph generators,
//! and a brute-force realizability-condition checker.

#![allow(dead_code)]

use std::collections::BTreeMap;

use graphmend::Multigraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense adjacency with the loop convention `A[i][i] = 2 * loops`.
pub struct DenseGraph {
    pub n: usize,
    pub a: Vec<Vec<u32>>,
}

impl DenseGraph {
    pub fn from_graph(g: &Multigraph) -> Self {
        let n = g.node_count();
        let mut a = vec![vec![0u32; n]; n];
        for (u, v) in g.edges() {
            if u == v {
                a[u as usize][u as usize] += 2;
            } else {
                a[u as usize][v as usize] += 1;
                a[v as usize][u as usize] += 1;
            }
        }
        DenseGraph { n, a }
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.a[i].iter().sum()
    }

    pub fn edge_count(&self) -> u64 {
        let total: u64 = (0..self.n).map(|i| self.degree(i) as u64).sum();
        total / 2
    }

    fn triangles(&self, i: usize) -> i64 {
        let mut t = 0i64;
        for j in 0..self.n {
            if j == i {
                continue;
            }
            for l in (j + 1)..self.n {
                if l == i {
                    continue;
                }
                t += self.a[i][j] as i64 * self.a[i][l] as i64 * self.a[j][l] as i64;
            }
        }
        t
    }

    pub fn degree_counts(&self) -> BTreeMap<u32, u64> {
        let mut c = BTreeMap::new();
        for i in 0..self.n {
            *c.entry(self.degree(i)).or_insert(0u64) += 1;
        }
        c
    }
}

/// All twelve properties computed from the dense matrix with literal
/// formulas: O(n^3)-class reference used for exactness checks.
pub struct NaiveReport {
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

#[allow(clippy::needless_range_loop)] // literal formula transcription
pub fn naive_report(g: &Multigraph) -> NaiveReport {
    let d = DenseGraph::from_graph(g);
    let n = d.n;
    let m = d.edge_count();
    let k_avg = 2.0 * m as f64 / n as f64;

    let counts = d.degree_counts();
    let p_k: BTreeMap<u32, f64> = counts
        .iter()
        .map(|(&k, &c)| (k, c as f64 / n as f64))
        .collect();

    let mut k_nn_k = BTreeMap::new();
    for (&k, &cnt) in &counts {
        if k == 0 {
            continue;
        }
        let mut sum = 0.0;
        for i in 0..n {
            if d.degree(i) != k {
                continue;
            }
            let mut s = 0.0;
            for j in 0..n {
                s += d.a[i][j] as f64 * d.degree(j) as f64;
            }
            sum += s / k as f64;
        }
        k_nn_k.insert(k, sum / cnt as f64);
    }

    let mut c_avg = 0.0;
    let mut c_sum: BTreeMap<u32, f64> = BTreeMap::new();
    for i in 0..n {
        let k = d.degree(i);
        let c_i = if k >= 2 {
            2.0 * d.triangles(i) as f64 / (k as f64 * (k as f64 - 1.0))
        } else {
            0.0
        };
        c_avg += c_i;
        *c_sum.entry(k).or_insert(0.0) += c_i;
    }
    c_avg /= n as f64;
    let c_k: BTreeMap<u32, f64> = c_sum
        .into_iter()
        .map(|(k, s)| (k, s / counts[&k] as f64))
        .collect();

    // edgewise shared partners over non-loop instances
    let mut s_hist: BTreeMap<u32, u64> = BTreeMap::new();
    let mut instances = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            if d.a[i][j] == 0 {
                continue;
            }
            let mut sp = 0u64;
            for w in 0..n {
                if w != i && w != j {
                    sp += d.a[i][w] as u64 * d.a[j][w] as u64;
                }
            }
            *s_hist.entry(sp as u32).or_insert(0) += d.a[i][j] as u64;
            instances += d.a[i][j] as u64;
        }
    }
    let p_s: BTreeMap<u32, f64> = s_hist
        .into_iter()
        .map(|(s, c)| (s, c as f64 / instances as f64))
        .collect();

    // largest connected component (simple view), ties to smallest member id
    let simple: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && d.a[i][j] > 0)
                .collect::<Vec<_>>()
        })
        .collect();
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut members = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &simple[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(v);
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    let lcc = comps
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
        .unwrap()
        .clone();

    let (l_avg, p_l, l_max, b_k) = if lcc.len() < 2 {
        (None, BTreeMap::new(), None, BTreeMap::new())
    } else {
        let ln = lcc.len();
        // Floyd-Warshall distances over the LCC
        const INF: u32 = u32::MAX / 4;
        let mut dist = vec![vec![INF; ln]; ln];
        for (ai, &i) in lcc.iter().enumerate() {
            dist[ai][ai] = 0;
            for (bi, &j) in lcc.iter().enumerate() {
                if i != j && d.a[i][j] > 0 {
                    dist[ai][bi] = 1;
                }
            }
        }
        for k in 0..ln {
            for i in 0..ln {
                let dik = dist[i][k];
                for (j, dij) in dist[i].clone().iter().enumerate() {
                    let via = dik + dist[k][j];
                    if via < *dij {
                        dist[i][j] = via;
                    }
                }
            }
        }
        // shortest-path counts via powers of the simple adjacency
        let mut sigma = vec![vec![0.0f64; ln]; ln];
        {
            let mut b = vec![vec![0.0f64; ln]; ln];
            for (ai, &i) in lcc.iter().enumerate() {
                for (bi, &j) in lcc.iter().enumerate() {
                    if i != j && d.a[i][j] > 0 {
                        b[ai][bi] = 1.0;
                    }
                }
            }
            let l_needed = (0..ln).flat_map(|i| dist[i].iter().copied()).max().unwrap() as usize;
            let mut power = vec![vec![0.0f64; ln]; ln];
            for (i, row) in power.iter_mut().enumerate() {
                row[i] = 1.0; // identity = B^0
            }
            for l in 1..=l_needed {
                let mut next = vec![vec![0.0f64; ln]; ln];
                for i in 0..ln {
                    for k in 0..ln {
                        if power[i][k] == 0.0 {
                            continue;
                        }
                        for j in 0..ln {
                            next[i][j] += power[i][k] * b[k][j];
                        }
                    }
                }
                power = next;
                for i in 0..ln {
                    for j in 0..ln {
                        if dist[i][j] as usize == l {
                            sigma[i][j] = power[i][j];
                        }
                    }
                }
            }
        }
        let mut dist_sum = 0u64;
        let mut hist: BTreeMap<u32, u64> = BTreeMap::new();
        let mut l_max = 0u32;
        for i in 0..ln {
            for j in (i + 1)..ln {
                dist_sum += 2 * dist[i][j] as u64;
                *hist.entry(dist[i][j]).or_insert(0) += 2;
                l_max = l_max.max(dist[i][j]);
            }
        }
        let pairs = (ln as u64) * (ln as u64 - 1);
        let l_avg = dist_sum as f64 / pairs as f64;
        let p_l: BTreeMap<u32, f64> = hist
            .into_iter()
            .map(|(l, c)| (l, c as f64 / pairs as f64))
            .collect();

        // betweenness: ordered double sum over (j, k)
        let mut b_i = vec![0.0f64; ln];
        for v in 0..ln {
            for j in 0..ln {
                if j == v {
                    continue;
                }
                for k in 0..ln {
                    if k == v || k == j {
                        continue;
                    }
                    if dist[j][v] + dist[v][k] == dist[j][k] && sigma[j][k] > 0.0 {
                        b_i[v] += sigma[j][v] * sigma[v][k] / sigma[j][k];
                    }
                }
            }
        }
        let mut class: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
        for (ai, &i) in lcc.iter().enumerate() {
            let k = d.degree(i);
            let e = class.entry(k).or_insert((0.0, 0));
            e.0 += b_i[ai];
            e.1 += 1;
        }
        let b_k: BTreeMap<u32, f64> = class
            .into_iter()
            .map(|(k, (s, c))| (k, s / c as f64))
            .collect();
        (Some(l_avg), p_l, Some(l_max), b_k)
    };

    // spectral radius by dense symmetric eigendecomposition
    let lambda_1 = {
        let mut mat = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] = d.a[i][j] as f64;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(mat);
        eig.eigenvalues.iter().copied().fold(f64::MIN, f64::max)
    };

    NaiveReport {
        n: n as u64,
        k_avg,
        p_k,
        k_nn_k,
        c_avg,
        c_k,
        p_s,
        l_avg,
        p_l,
        l_max,
        b_k,
        lambda_1,
    }
}

/// Exact joint degree distribution `P(k, k') = mu m(k, k') / 2m` as canonical
/// entries (k <= k').
pub fn exact_jdd(g: &Multigraph) -> BTreeMap<(u32, u32), f64> {
    let d = DenseGraph::from_graph(g);
    let m = d.edge_count() as f64;
    let mut m_kk: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for i in 0..d.n {
        for j in i..d.n {
            let mult = if i == j { d.a[i][i] / 2 } else { d.a[i][j] };
            if mult > 0 {
                let (a, b) = (d.degree(i), d.degree(j));
                *m_kk.entry((a.min(b), a.max(b))).or_insert(0) += mult as u64;
            }
        }
    }
    m_kk.into_iter()
        .map(|((k, k2), cnt)| {
            let mu = if k == k2 { 2.0 } else { 1.0 };
            ((k, k2), mu * cnt as f64 / (2.0 * m))
        })
        .collect()
}

/// Exact degree-dependent clustering coefficient.
pub fn exact_ddcc(g: &Multigraph) -> BTreeMap<u32, f64> {
    let d = DenseGraph::from_graph(g);
    let counts = d.degree_counts();
    let mut out = BTreeMap::new();
    for (&k, &cnt) in &counts {
        if k == 0 {
            continue;
        }
        if k == 1 {
            out.insert(1, 0.0);
            continue;
        }
        let mut sum = 0.0;
        for i in 0..d.n {
            if d.degree(i) == k {
                sum += 2.0 * d.triangles(i) as f64 / (k as f64 * (k as f64 - 1.0));
            }
        }
        out.insert(k, sum / cnt as f64);
    }
    out
}

/// Exact degree distribution.
pub fn exact_degree_dist(g: &Multigraph) -> BTreeMap<u32, f64> {
    let d = DenseGraph::from_graph(g);
    d.degree_counts()
        .into_iter()
        .map(|(k, c)| (k, c as f64 / d.n as f64))
        .collect()
}

/// Connected simple random graph: uniform random attachment tree plus extra
/// deduplicated non-loop edges.
pub fn random_connected_graph(n: usize, extra_edges: usize, rng: &mut ChaCha8Rng) -> Multigraph {
    assert!(n >= 2);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut have: std::collections::HashSet<(u32, u32)> = std::collections::HashSet::new();
    for v in 1..n as u32 {
        let u = rng.gen_range(0..v);
        edges.push((u, v));
        have.insert((u, v));
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < extra_edges && attempts < extra_edges * 20 {
        attempts += 1;
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if have.insert(key) {
            edges.push(key);
            added += 1;
        }
    }
    Multigraph::from_edges(n, &edges)
}

/// Random multigraph permitting multi-edges and loops (for metric exactness).
pub fn random_multigraph(n: usize, m: usize, loops: bool, rng: &mut ChaCha8Rng) -> Multigraph {
    let mut g = Multigraph::new(n);
    for _ in 0..m {
        let u = rng.gen_range(0..n as u32);
        let mut v = rng.gen_range(0..n as u32);
        if !loops && u == v {
            v = (v + 1) % n as u32;
        }
        g.add_edge(u, v);
    }
    g
}

/// Sorted per-degree node counts of a graph.
pub fn realized_degree_counts(g: &Multigraph) -> BTreeMap<u32, u64> {
    let mut counts = BTreeMap::new();
    for i in 0..g.node_count() {
        *counts.entry(g.degree(i as u32) as u32).or_insert(0u64) += 1;
    }
    counts
}

/// Per degree-class edge counts of a graph (by realized endpoint degrees).
pub fn realized_class_counts(g: &Multigraph) -> BTreeMap<(u32, u32), u64> {
    let mut counts = BTreeMap::new();
    for (u, v) in g.edges() {
        let a = g.degree(u) as u32;
        let b = g.degree(v) as u32;
        *counts.entry((a.min(b), a.max(b))).or_insert(0u64) += 1;
    }
    counts
}

/// Brute-force check of all seven realizability conditions from raw data:
/// a degree-vector listing, the subgraph with its target-degree assignment,
/// and a JDM listing. Panics with a description on the first violation.
pub fn assert_conditions(
    dv: &[(u32, u64)],
    jdm: &[(u32, u32, u64)],
    sub: &graphmend::crawl::SampledSubgraph,
    assignment: &[u32],
) {
    let k_max = dv.iter().map(|&(k, _)| k).max().unwrap_or(0);
    let n_star = |k: u32| -> u64 {
        dv.iter()
            .find(|&&(kk, _)| kk == k)
            .map(|&(_, c)| c)
            .unwrap_or(0)
    };

    // DV-2
    let degree_sum: u64 = dv.iter().map(|&(k, c)| k as u64 * c).sum();
    assert_eq!(degree_sum % 2, 0, "DV-2: odd degree sum {degree_sum}");

    // DV-3 from scratch
    let mut n_prime: BTreeMap<u32, u64> = BTreeMap::new();
    for &t in assignment {
        *n_prime.entry(t).or_insert(0) += 1;
    }
    for (&k, &np) in &n_prime {
        assert!(
            n_star(k) >= np,
            "DV-3: n*({k}) = {} below subgraph count {np}",
            n_star(k)
        );
    }

    // Lemma-1 consistency of the assignment itself
    for (i, &assigned) in assignment.iter().enumerate() {
        let d_sub = sub.graph.degree(i as u32) as u32;
        if sub.queried[i] {
            assert_eq!(assigned, d_sub, "queried node {i} target degree");
        } else {
            assert!(assigned >= d_sub, "visible node {i} target degree");
        }
    }

    // JDM-1/2 are structural (counts, canonical keys); verify key canonicity
    let get = |k: u32, k2: u32| -> u64 {
        let key = (k.min(k2), k.max(k2));
        jdm.iter()
            .find(|&&(a, b, _)| (a, b) == key)
            .map(|&(_, _, c)| c)
            .unwrap_or(0)
    };
    for &(a, b, _) in jdm {
        assert!(a <= b, "JDM entries must be canonical");
    }

    // JDM-3 from scratch
    for k in 1..=k_max {
        let mut s = 0u64;
        for k2 in 1..=k_max {
            let mu = if k == k2 { 2 } else { 1 };
            s += mu * get(k, k2);
        }
        assert_eq!(
            s,
            k as u64 * n_star(k),
            "JDM-3 at k={k}: row sum {s} vs {}",
            k as u64 * n_star(k)
        );
    }

    // JDM-4 from scratch
    let mut m_prime: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (u, v) in sub.graph.edges() {
        let (a, b) = (assignment[u as usize], assignment[v as usize]);
        *m_prime.entry((a.min(b), a.max(b))).or_insert(0) += 1;
    }
    for (&(a, b), &req) in &m_prime {
        assert!(
            get(a, b) >= req,
            "JDM-4 at ({a},{b}): m* = {} below subgraph count {req}",
            get(a, b)
        );
    }
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    let denom = expected.abs().max(1e-300);
    assert!(
        (actual - expected).abs() / denom <= tol || (actual - expected).abs() <= tol,
        "{what}: {actual} vs {expected} (tol {tol})"
    );
}

/// L1 distance between two maps over the union of supports, normalized by the
/// first map's mass (test-side duplicate of the accuracy measure).
pub fn l1_map(orig: &BTreeMap<u32, f64>, gen: &BTreeMap<u32, f64>) -> f64 {
    let keys: std::collections::BTreeSet<u32> = orig.keys().chain(gen.keys()).copied().collect();
    let num: f64 = keys
        .iter()
        .map(|k| (orig.get(k).copied().unwrap_or(0.0) - gen.get(k).copied().unwrap_or(0.0)).abs())
        .sum();
    let den: f64 = orig.values().sum();
    num / den
}
