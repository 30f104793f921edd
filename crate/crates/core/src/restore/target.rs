//! Target degree vector: initialization, parity adjustment, and the
//! subgraph-aware modification that assigns every sampled node its target
//! degree.
//!
//! Realizability conditions maintained here:
//! - DV-1: every `n*(k)` is a non-negative integer (by construction).
//! - DV-2: the degree sum `sum_k k n*(k)` is even.
//! - DV-3: `n*(k) >= n'(k)`, the number of subgraph nodes assigned target
//!   degree `k`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::crawl::SampledSubgraph;
use crate::estimate::LocalEstimates;

/// Nearest integer with halves rounded away from zero.
pub fn near_int(x: f64) -> u64 {
    x.round().max(0.0) as u64
}

/// Target node count per degree, indexed 1..=k_max.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetDegreeVector {
    counts: Vec<u64>, // counts[0] unused
}

impl TargetDegreeVector {
    pub fn zeros(k_max: u32) -> Self {
        TargetDegreeVector {
            counts: vec![0; k_max as usize + 1],
        }
    }

    /// Test/seed constructor from explicit `(k, n*(k))` pairs.
    pub fn from_counts(k_max: u32, pairs: &[(u32, u64)]) -> Self {
        let mut dv = TargetDegreeVector::zeros(k_max);
        for &(k, c) in pairs {
            dv.counts[k as usize] = c;
        }
        dv
    }

    pub fn k_max(&self) -> u32 {
        (self.counts.len() - 1) as u32
    }

    pub fn n_at(&self, k: u32) -> u64 {
        self.counts.get(k as usize).copied().unwrap_or(0)
    }

    pub fn bump(&mut self, k: u32, by: u64) {
        self.counts[k as usize] += by;
    }

    pub fn raise_to(&mut self, k: u32, floor: u64) {
        if self.counts[k as usize] < floor {
            self.counts[k as usize] = floor;
        }
    }

    pub fn total_nodes(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn degree_sum(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| k as u64 * c)
            .sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k as u32, c))
    }
}

/// Target degree `d_i*` per subgraph dense id.
#[derive(Debug, Clone, Default)]
pub struct DegreeAssignment {
    pub target: Vec<u32>,
}

impl DegreeAssignment {
    pub fn empty() -> Self {
        DegreeAssignment { target: Vec::new() }
    }

    /// Subgraph node counts per assigned target degree, `n'(k)`.
    pub fn class_counts(&self, k_max: u32) -> Vec<u64> {
        let mut counts = vec![0u64; k_max as usize + 1];
        for &k in &self.target {
            counts[k as usize] += 1;
        }
        counts
    }
}

/// Relative-error increase of `n*(k)` when incremented by one; infinite where
/// the estimate has no mass.
fn delta_plus(n_hat_k: f64, current: u64) -> f64 {
    if n_hat_k <= 0.0 {
        return f64::INFINITY;
    }
    let cur = current as f64;
    ((n_hat_k - (cur + 1.0)).abs() - (n_hat_k - cur).abs()) / n_hat_k
}

/// Initialization step: `n*(k) = max(NearInt(n_hat P(k)), 1)` wherever the
/// estimated degree distribution has mass, over degrees up to the larger of
/// the estimate's support and the subgraph's maximum degree.
pub fn init_degree_vector(est: &LocalEstimates, sub: &SampledSubgraph) -> TargetDegreeVector {
    let sub_max = (0..sub.graph.node_count())
        .map(|i| sub.graph.degree(i as u32) as u32)
        .max()
        .unwrap_or(0);
    let k_max = est.k_max.max(sub_max).max(1);
    let mut dv = TargetDegreeVector::zeros(k_max);
    for (&k, &p) in &est.p_k {
        if p > 0.0 {
            dv.counts[k as usize] = near_int(est.n_hat * p).max(1);
        }
    }
    dv
}

/// Parity adjustment: if the degree sum is odd, increment `n*(k)` for the odd
/// degree with the smallest error increase, ties to the smallest degree.
pub fn adjust_degree_vector(dv: &mut TargetDegreeVector, est: &LocalEstimates) {
    if dv.degree_sum().is_multiple_of(2) {
        return;
    }
    let mut best_k = 1u32;
    let mut best = f64::INFINITY;
    let mut k = 1u32;
    while k <= dv.k_max() {
        let d = delta_plus(est.n_hat * est.p_at(k), dv.n_at(k));
        if d < best {
            best = d;
            best_k = k;
        }
        k += 2;
    }
    dv.bump(best_k, 1);
}

/// Fenwick tree over degree weights, used to draw uniformly from the implied
/// multiset of assignable degrees without materializing it.
struct DegreeWeights {
    tree: Vec<u64>,
}

impl DegreeWeights {
    fn new(k_max: u32) -> Self {
        DegreeWeights {
            tree: vec![0; k_max as usize + 1],
        }
    }

    fn add(&mut self, k: u32, delta: i64) {
        let mut i = k as usize;
        while i < self.tree.len() {
            self.tree[i] = (self.tree[i] as i64 + delta) as u64;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, k: u32) -> u64 {
        let mut i = k as usize;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Smallest `k` with `prefix(k) >= target` (1-based `target`).
    fn find_by_prefix(&self, mut target: u64) -> u32 {
        let mut pos = 0usize;
        let mut step = self.tree.len().next_power_of_two() / 2;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] < target {
                target -= self.tree[next];
                pos = next;
            }
            step /= 2;
        }
        (pos + 1) as u32
    }
}

/// Modification step: assigns target degrees to all subgraph nodes (queried
/// nodes keep their subgraph degree, visible nodes draw from the remaining
/// target mass in decreasing-degree order) and raises `n*(k)` wherever the
/// subgraph forces it. Re-runs the parity adjustment if the degree sum came
/// out odd.
pub fn modify_degree_vector(
    dv: &mut TargetDegreeVector,
    sub: &SampledSubgraph,
    est: &LocalEstimates,
    rng: &mut ChaCha8Rng,
) -> DegreeAssignment {
    let k_max = dv.k_max();
    let n_sub = sub.graph.node_count();
    let mut target = vec![0u32; n_sub];
    let mut n_prime = vec![0u64; k_max as usize + 1];

    for i in sub.queried_ids() {
        let d = sub.graph.degree(i) as u32;
        target[i as usize] = d;
        n_prime[d as usize] += 1;
    }
    for k in 1..=k_max {
        dv.raise_to(k, n_prime[k as usize]);
    }

    // remaining assignable mass per degree: n*(k) - n'(k)
    let mut weights = DegreeWeights::new(k_max);
    for k in 1..=k_max {
        weights.add(k, (dv.n_at(k) - n_prime[k as usize]) as i64);
    }

    let mut visible: Vec<u32> = sub.visible_ids().collect();
    visible.sort_by_key(|&i| (std::cmp::Reverse(sub.graph.degree(i)), i));

    for i in visible {
        let d_sub = sub.graph.degree(i) as u32;
        assert!(d_sub <= k_max, "visible degree exceeds target maximum");
        let total = weights.prefix(k_max);
        let below = if d_sub > 1 {
            weights.prefix(d_sub - 1)
        } else {
            0
        };
        let available = total - below;
        let k = if available > 0 {
            weights.find_by_prefix(below + rng.gen_range(1..=available))
        } else {
            // no remaining mass at or above d_sub: smallest error increase,
            // ties to the smallest degree
            let mut best_k = d_sub;
            let mut best = f64::INFINITY;
            for cand in d_sub..=k_max {
                let d = delta_plus(est.n_hat * est.p_at(cand), dv.n_at(cand));
                if d < best {
                    best = d;
                    best_k = cand;
                }
            }
            best_k
        };
        target[i as usize] = k;
        n_prime[k as usize] += 1;
        if dv.n_at(k) < n_prime[k as usize] {
            dv.raise_to(k, n_prime[k as usize]);
        } else if available > 0 {
            // the draw consumed one unit of remaining mass
            weights.add(k, -1);
        }
    }

    if !dv.degree_sum().is_multiple_of(2) {
        adjust_degree_vector(dv, est);
    }

    DegreeAssignment { target }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crawl::{induced_subgraph, SamplingList};
    use crate::graph::Multigraph;
    use rand::SeedableRng;
    use std::collections::BTreeMap;

    fn est_with(n_hat: f64, p: &[(u32, f64)]) -> LocalEstimates {
        LocalEstimates {
            n_hat,
            k_avg_hat: 0.0,
            k_max: p.iter().map(|&(k, _)| k).max().unwrap_or(1),
            p_k: p.iter().copied().collect(),
            p_kk: BTreeMap::new(),
            c_k: BTreeMap::new(),
            c_k_clamped: Vec::new(),
        }
    }

    #[test]
    fn near_int_rounds_half_away_from_zero() {
        assert_eq!(near_int(5.5), 6);
        assert_eq!(near_int(4.5), 5);
        assert_eq!(near_int(4.4), 4);
        assert_eq!(near_int(0.1), 0);
    }

    #[test]
    fn init_applies_nearint_and_floor() {
        let est = est_with(10.0, &[(1, 0.55), (2, 0.45)]);
        let dv = init_degree_vector(&est, &SampledSubgraph::empty());
        assert_eq!(dv.n_at(1), 6);
        assert_eq!(dv.n_at(2), 5);

        // tiny positive mass still yields one node
        let est = est_with(1.0, &[(1, 0.1), (2, 0.9)]);
        let dv = init_degree_vector(&est, &SampledSubgraph::empty());
        assert_eq!(dv.n_at(1), 1);
    }

    #[test]
    fn init_k_max_includes_subgraph() {
        // estimate support stops at degree 1 but the subgraph has a degree-7 hub
        let mut edges = Vec::new();
        for leaf in 1..=7u32 {
            edges.push((0, leaf));
        }
        let g = Multigraph::from_edges(8, &edges);
        let walk = SamplingList {
            entries: vec![(0, g.neighbors(0).to_vec())],
        };
        let sub = induced_subgraph(&walk).unwrap();
        let est = est_with(3.0, &[(1, 1.0)]);
        let dv = init_degree_vector(&est, &sub);
        assert_eq!(dv.k_max(), 7);
    }

    #[test]
    fn adjust_leaves_even_sum_alone() {
        let est = est_with(2.0, &[(1, 0.5), (3, 0.5)]);
        let mut dv = TargetDegreeVector::from_counts(3, &[(1, 1), (3, 1)]);
        adjust_degree_vector(&mut dv, &est);
        assert_eq!(dv.n_at(1), 1);
        assert_eq!(dv.n_at(3), 1);
    }

    #[test]
    fn adjust_picks_only_finite_odd_degree() {
        // degree sum 1*1 + 2*1 = 3 is odd; odd candidates are 1 (mass 1.4) and
        // 3 (no mass, infinite cost), so n*(1) is incremented
        let est = est_with(2.0, &[(1, 0.7), (2, 0.3)]);
        let mut dv = TargetDegreeVector::from_counts(3, &[(1, 1), (2, 1)]);
        adjust_degree_vector(&mut dv, &est);
        assert_eq!(dv.n_at(1), 2);
        assert_eq!(dv.degree_sum() % 2, 0);
    }

    #[test]
    fn adjust_breaks_ties_toward_smallest_degree() {
        // no odd degree has estimate mass: both candidates cost infinity and
        // the tie goes to degree 1
        let est = est_with(4.0, &[(2, 1.0)]);
        let mut dv = TargetDegreeVector::from_counts(3, &[(2, 1), (3, 1)]);
        assert_eq!(dv.degree_sum() % 2, 1);
        adjust_degree_vector(&mut dv, &est);
        assert_eq!(dv.n_at(1), 1);
    }

    #[test]
    fn modify_assigns_queried_exactly_and_respects_lemma() {
        let g = crate::graph::Multigraph::from_edges(
            8,
            &[(0, 2), (1, 2), (2, 3), (2, 5), (4, 5), (5, 7), (6, 7)],
        );
        let entries: Vec<(u32, Vec<u32>)> = [0u32, 2, 5, 2]
            .iter()
            .map(|&x| (x, g.neighbors(x).to_vec()))
            .collect();
        let sub = induced_subgraph(&SamplingList { entries }).unwrap();
        let est = est_with(8.0, &[(1, 0.5), (2, 0.2), (3, 0.15), (4, 0.15)]);
        let mut dv = init_degree_vector(&est, &sub);
        adjust_degree_vector(&mut dv, &est);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let assign = modify_degree_vector(&mut dv, &sub, &est, &mut rng);

        for i in sub.queried_ids() {
            assert_eq!(assign.target[i as usize], sub.graph.degree(i) as u32);
        }
        for i in sub.visible_ids() {
            assert!(assign.target[i as usize] >= sub.graph.degree(i) as u32);
        }
        // DV-1..3
        let n_prime = assign.class_counts(dv.k_max());
        for k in 1..=dv.k_max() {
            assert!(dv.n_at(k) >= n_prime[k as usize], "DV-3 at k={k}");
        }
        assert_eq!(dv.degree_sum() % 2, 0, "DV-2");
    }

    #[test]
    fn modify_forced_choice_when_no_mass_remains() {
        // one queried hub (degree 3) and three visible leaves, but the target
        // vector has no room at degree >= 1 beyond what is forced
        let g = Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let walk = SamplingList {
            entries: vec![(0, g.neighbors(0).to_vec())],
        };
        let sub = induced_subgraph(&walk).unwrap();
        let est = est_with(1.0, &[(3, 1.0)]);
        let mut dv = init_degree_vector(&est, &sub);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let assign = modify_degree_vector(&mut dv, &sub, &est, &mut rng);
        let n_prime = assign.class_counts(dv.k_max());
        for k in 1..=dv.k_max() {
            assert!(dv.n_at(k) >= n_prime[k as usize]);
        }
        assert_eq!(dv.degree_sum() % 2, 0);
    }
}
