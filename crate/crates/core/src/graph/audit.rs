//! Search for small vertex subsets that span too many edges.
//!
//! The audited quantity is `f(S) = |E_S| − (1+ε)|S|` over subsets with
//! `2 ≤ |S| ≤ ⌊ηn⌋`; a subset is a violator when `f(S) > 0`.
//!
//! `f` is additive over the connected components of the induced subgraph, so
//! the exhaustive mode only enumerates connected subsets. When none of them
//! violates, the best connected subset is the global maximum (adding a
//! non-positive component never helps). Otherwise the maximum is a packing of
//! pairwise disjoint, non-adjacent violating components, found by
//! branch-and-bound over the violating connected subsets.

use rand::Rng;

use super::RegularGraph;
use crate::error::{precondition, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditMode {
    Exhaustive,
    Stochastic,
}

/// How the reported maximum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditReduction {
    /// No connected violator exists; the densest connected subset is the maximum.
    DensestComponent,
    /// Maximum over unions of disjoint, non-adjacent violating components.
    UnionOfViolators,
    /// Greedy densification from random seeds; a lower bound only.
    GreedyLowerBound,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub mode: AuditMode,
    pub reduction: AuditReduction,
    pub eta: f64,
    pub epsilon: f64,
    /// `⌊ηn⌋`.
    pub max_size: usize,
    /// Sorted vertex set achieving `worst_margin`; empty when no subset qualifies.
    pub worst_subset: Vec<u32>,
    /// `max |E_S| − (1+ε)|S|` over the explored subsets (`−∞` if none).
    pub worst_margin: f64,
    pub violated: bool,
    /// Connected subsets enumerated, or greedy seeds run.
    pub explored: u64,
}

/// Audits `g` for subsets of at most `⌊ηn⌋` vertices spanning more than
/// `(1+ε)|S|` edges.
///
/// `budget` caps the number of enumerated connected subsets (exhaustive mode,
/// exceeding it is an error) or is the number of random seeds (stochastic mode).
pub fn audit_subset_density<R: Rng + ?Sized>(
    g: &RegularGraph,
    eta: f64,
    epsilon: f64,
    mode: AuditMode,
    budget: u64,
    rng: &mut R,
) -> Result<AuditReport> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(precondition(format!("eta = {eta} must lie in (0, 1]")));
    }
    if !(epsilon > 0.0) {
        return Err(precondition(format!("epsilon = {epsilon} must be positive")));
    }
    let max_size = (eta * g.n() as f64).floor() as usize;
    let mut report = AuditReport {
        mode,
        reduction: match mode {
            AuditMode::Exhaustive => AuditReduction::DensestComponent,
            AuditMode::Stochastic => AuditReduction::GreedyLowerBound,
        },
        eta,
        epsilon,
        max_size,
        worst_subset: Vec::new(),
        worst_margin: f64::NEG_INFINITY,
        violated: false,
        explored: 0,
    };
    if max_size < 2 {
        return Ok(report);
    }
    match mode {
        AuditMode::Exhaustive => exhaustive(g, epsilon, max_size, budget, &mut report)?,
        AuditMode::Stochastic => greedy(g, epsilon, max_size, budget, rng, &mut report),
    }
    report.worst_subset.sort_unstable();
    report.violated = report.worst_margin > 0.0;
    Ok(report)
}

fn margin(edges: usize, size: usize, epsilon: f64) -> f64 {
    edges as f64 - (1.0 + epsilon) * size as f64
}

struct Candidate {
    vertices: Vec<u32>,
    value: f64,
}

fn exhaustive(
    g: &RegularGraph,
    epsilon: f64,
    max_size: usize,
    budget: u64,
    report: &mut AuditReport,
) -> Result<()> {
    let mut violators: Vec<Candidate> = Vec::new();
    let mut best = Candidate { vertices: Vec::new(), value: f64::NEG_INFINITY };
    report.explored = for_each_connected_subset(g, max_size, budget, |set, edges| {
        if set.len() < 2 {
            return;
        }
        let value = margin(edges, set.len(), epsilon);
        if value > best.value {
            best = Candidate { vertices: set.to_vec(), value };
        }
        if value > 0.0 {
            violators.push(Candidate { vertices: set.to_vec(), value });
        }
    })?;
    if violators.is_empty() {
        report.worst_margin = best.value;
        report.worst_subset = best.vertices;
        return Ok(());
    }
    report.reduction = AuditReduction::UnionOfViolators;
    let (value, vertices) = best_packing(g, epsilon, max_size, budget, violators)?;
    report.worst_margin = value;
    report.worst_subset = vertices;
    Ok(())
}

/// Calls `visit(subset, induced_edges)` once for every connected vertex subset
/// of size at most `max_size` (ESU-style enumeration rooted at the minimum
/// vertex). Returns the number of subsets visited.
pub(crate) fn for_each_connected_subset<F: FnMut(&[u32], usize)>(
    g: &RegularGraph,
    max_size: usize,
    budget: u64,
    mut visit: F,
) -> Result<u64> {
    struct Walk<'a, F> {
        g: &'a RegularGraph,
        max_size: usize,
        budget: u64,
        count: u64,
        subset: Vec<u32>,
        // Number of subset vertices whose closed neighbourhood contains each vertex.
        cover: Vec<u32>,
        visit: F,
    }

    impl<F: FnMut(&[u32], usize)> Walk<'_, F> {
        fn add(&mut self, w: u32, delta: i64) {
            self.cover[w as usize] = (self.cover[w as usize] as i64 + delta) as u32;
            for u in self.g.neighbors(w) {
                self.cover[u as usize] = (self.cover[u as usize] as i64 + delta) as u32;
            }
        }

        fn extend(&mut self, mut extension: Vec<u32>, root: u32, edges: usize) -> Result<()> {
            self.count += 1;
            if self.count > self.budget {
                return Err(Error::Resource(format!(
                    "exhaustive audit exceeded its budget of {} subsets",
                    self.budget
                )));
            }
            (self.visit)(&self.subset, edges);
            if self.subset.len() == self.max_size {
                return Ok(());
            }
            while let Some(w) = extension.pop() {
                let mut next = extension.clone();
                next.extend(self.g.neighbors(w).filter(|&u| u > root && self.cover[u as usize] == 0));
                let added = self.g.neighbors(w).filter(|u| self.subset.contains(u)).count();
                self.subset.push(w);
                self.add(w, 1);
                self.extend(next, root, edges + added)?;
                self.add(w, -1);
                self.subset.pop();
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        g,
        max_size,
        budget,
        count: 0,
        subset: Vec::with_capacity(max_size),
        cover: vec![0; g.n()],
        visit: &mut visit,
    };
    for root in 0..g.n() as u32 {
        walk.subset.push(root);
        walk.add(root, 1);
        let extension: Vec<u32> = g.neighbors(root).filter(|&u| u > root).collect();
        walk.extend(extension, root, 0)?;
        walk.add(root, -1);
        walk.subset.pop();
    }
    Ok(walk.count)
}

fn best_packing(
    g: &RegularGraph,
    epsilon: f64,
    max_size: usize,
    budget: u64,
    mut candidates: Vec<Candidate>,
) -> Result<(f64, Vec<u32>)> {
    candidates.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.vertices.cmp(&b.vertices)));
    // f(S) ≤ (d/2 − 1 − ε)|S| for any S.
    let slope = (g.d() as f64 / 2.0 - 1.0 - epsilon).max(0.0);

    struct Search<'a> {
        g: &'a RegularGraph,
        candidates: &'a [Candidate],
        max_size: usize,
        slope: f64,
        budget: u64,
        nodes: u64,
        blocked: Vec<u32>,
        chosen: Vec<usize>,
        best_value: f64,
        best: Vec<usize>,
    }

    impl Search<'_> {
        fn toggle(&mut self, i: usize, delta: i64) {
            for &v in &self.candidates[i].vertices {
                for u in std::iter::once(v).chain(self.g.neighbors(v)) {
                    self.blocked[u as usize] = (self.blocked[u as usize] as i64 + delta) as u32;
                }
            }
        }

        fn run(&mut self, start: usize, used: usize, value: f64) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::Resource("violator packing search exceeded its budget".into()));
            }
            if value > self.best_value {
                self.best_value = value;
                self.best = self.chosen.clone();
            }
            for i in start..self.candidates.len() {
                if value + self.slope * (self.max_size - used) as f64 <= self.best_value {
                    break;
                }
                let c = &self.candidates[i];
                if used + c.vertices.len() > self.max_size
                    || c.vertices.iter().any(|&v| self.blocked[v as usize] > 0)
                {
                    continue;
                }
                self.toggle(i, 1);
                self.chosen.push(i);
                self.run(i + 1, used + c.vertices.len(), value + c.value)?;
                self.chosen.pop();
                self.toggle(i, -1);
            }
            Ok(())
        }
    }

    let mut search = Search {
        g,
        candidates: &candidates,
        max_size,
        slope,
        budget,
        nodes: 0,
        blocked: vec![0; g.n()],
        chosen: Vec::new(),
        best_value: f64::NEG_INFINITY,
        best: Vec::new(),
    };
    search.run(0, 0, 0.0)?;
    let vertices = search
        .best
        .iter()
        .flat_map(|&i| candidates[i].vertices.iter().copied())
        .collect();
    Ok((search.best_value, vertices))
}

fn greedy<R: Rng + ?Sized>(
    g: &RegularGraph,
    epsilon: f64,
    max_size: usize,
    seeds: u64,
    rng: &mut R,
    report: &mut AuditReport,
) {
    let n = g.n();
    let mut in_set = vec![false; n];
    // Edges from each outside vertex into the current set.
    let mut links = vec![0usize; n];
    let mut boundary: Vec<u32> = Vec::new();
    let mut set: Vec<u32> = Vec::with_capacity(max_size);

    for _ in 0..seeds {
        report.explored += 1;
        let start = rng.random_range(0..n as u32);
        let mut edges = 0usize;
        set.push(start);
        in_set[start as usize] = true;
        for u in g.neighbors(start) {
            if links[u as usize] == 0 {
                boundary.push(u);
            }
            links[u as usize] += 1;
        }
        while set.len() < max_size && !boundary.is_empty() {
            // Most-connected boundary vertex, ties broken uniformly.
            let mut pick = 0usize;
            let mut ties = 0u32;
            for (i, &u) in boundary.iter().enumerate() {
                let (cur, best) = (links[u as usize], links[boundary[pick] as usize]);
                if cur > best {
                    pick = i;
                    ties = 1;
                } else if cur == best {
                    ties += 1;
                    if rng.random_range(0..ties) == 0 {
                        pick = i;
                    }
                }
            }
            let w = boundary.swap_remove(pick);
            edges += links[w as usize];
            links[w as usize] = 0;
            in_set[w as usize] = true;
            set.push(w);
            for u in g.neighbors(w) {
                if !in_set[u as usize] {
                    if links[u as usize] == 0 {
                        boundary.push(u);
                    }
                    links[u as usize] += 1;
                }
            }
            let value = margin(edges, set.len(), epsilon);
            if value > report.worst_margin {
                report.worst_margin = value;
                report.worst_subset = set.clone();
            }
        }
        for &u in &boundary {
            links[u as usize] = 0;
        }
        boundary.clear();
        for &v in &set {
            in_set[v as usize] = false;
        }
        set.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_regular_graph;
    use crate::rng;

    /// Maximum of `f` over all subsets with `2 ≤ |S| ≤ max_size`, by bitmask.
    fn brute_force(g: &RegularGraph, epsilon: f64, max_size: usize) -> f64 {
        let n = g.n();
        assert!(n <= 20);
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size < 2 || size > max_size {
                continue;
            }
            let edges = g
                .edges()
                .iter()
                .filter(|&&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1)
                .count();
            best = best.max(margin(edges, size, epsilon));
        }
        best
    }

    fn connected_count_brute(g: &RegularGraph, max_size: usize) -> u64 {
        let n = g.n();
        let mut count = 0;
        for mask in 1u32..(1 << n) {
            if mask.count_ones() as usize > max_size {
                continue;
            }
            let start = mask.trailing_zeros();
            let mut seen = 1u32 << start;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for u in g.neighbors(v) {
                    if mask >> u & 1 == 1 && seen >> u & 1 == 0 {
                        seen |= 1 << u;
                        stack.push(u);
                    }
                }
            }
            if seen == mask {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn enumerates_each_connected_subset_once() {
        let mut r = rng::stream(11, 0);
        for g in [
            RegularGraph::complete(4).unwrap(),
            RegularGraph::cycle(7).unwrap(),
            RegularGraph::complete_bipartite(3).unwrap(),
            sample_regular_graph(12, 3, &mut r, None).unwrap().graph,
        ] {
            for k in [1, 3, g.n()] {
                let mut sets = Vec::new();
                let count = for_each_connected_subset(&g, k, u64::MAX, |s, e| {
                    let mut s = s.to_vec();
                    assert_eq!(g.induced_edge_count(&s), e);
                    s.sort();
                    sets.push(s);
                })
                .unwrap();
                let distinct = {
                    let mut v = sets.clone();
                    v.sort();
                    v.dedup();
                    v.len() as u64
                };
                assert_eq!(count, distinct);
                assert_eq!(count, connected_count_brute(&g, k));
            }
        }
    }

    #[test]
    fn cycle_never_violates() {
        let g = RegularGraph::cycle(10).unwrap();
        let mut r = rng::stream(12, 0);
        for eps in [0.01, 0.5] {
            for mode in [AuditMode::Exhaustive, AuditMode::Stochastic] {
                let rep = audit_subset_density(&g, 1.0, eps, mode, 100_000, &mut r).unwrap();
                assert!(!rep.violated);
            }
        }
    }

    #[test]
    fn k4_whole_graph_violates() {
        let g = RegularGraph::complete(4).unwrap();
        let rep =
            audit_subset_density(&g, 1.0, 0.4, AuditMode::Exhaustive, 1000, &mut rng::stream(0, 0))
                .unwrap();
        assert!(rep.violated);
        assert_eq!(rep.worst_subset, vec![0, 1, 2, 3]);
        assert!((rep.worst_margin - 0.4).abs() < 1e-12);
        assert_eq!(rep.reduction, AuditReduction::UnionOfViolators);
    }

    #[test]
    fn tree_like_subsets_never_violate() {
        // On a cycle of length 12 with η = 0.5 every subset is a forest of paths;
        // the best has a single edge.
        let g = RegularGraph::cycle(12).unwrap();
        let rep =
            audit_subset_density(&g, 0.5, 0.01, AuditMode::Exhaustive, 1_000_000, &mut rng::stream(0, 0))
                .unwrap();
        assert!(!rep.violated);
        assert!((rep.worst_margin - (1.0 - 2.0 * 1.01)).abs() < 1e-12);
        assert_eq!(rep.worst_subset.len(), 2);
        assert_eq!(rep.reduction, AuditReduction::DensestComponent);
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        let mut r = rng::stream(13, 0);
        for i in 0..12 {
            let d = [3, 4][i % 2];
            let g = sample_regular_graph(12, d, &mut r, None).unwrap().graph;
            for (eta, eps) in [(1.0, 0.3), (0.5, 0.1), (0.34, 0.05), (1.0, 0.9)] {
                let rep = audit_subset_density(&g, eta, eps, AuditMode::Exhaustive, u64::MAX, &mut r)
                    .unwrap();
                let oracle = brute_force(&g, eps, rep.max_size);
                assert!((rep.worst_margin - oracle).abs() < 1e-9, "{} vs {oracle}", rep.worst_margin);
                let e = g.induced_edge_count(&rep.worst_subset);
                assert!((margin(e, rep.worst_subset.len(), eps) - oracle).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn greedy_is_a_lower_bound() {
        let mut r = rng::stream(14, 0);
        let g = sample_regular_graph(14, 3, &mut r, None).unwrap().graph;
        let ex = audit_subset_density(&g, 0.5, 0.1, AuditMode::Exhaustive, u64::MAX, &mut r).unwrap();
        let st = audit_subset_density(&g, 0.5, 0.1, AuditMode::Stochastic, 50, &mut r).unwrap();
        assert!(st.worst_margin <= ex.worst_margin + 1e-12);
        assert_eq!(g.induced_edge_count(&st.worst_subset) as f64 - 1.1 * st.worst_subset.len() as f64, st.worst_margin);
    }

    #[test]
    fn budget_and_parameter_errors() {
        let g = RegularGraph::complete(6).unwrap();
        let mut r = rng::stream(0, 0);
        assert!(matches!(
            audit_subset_density(&g, 1.0, 0.1, AuditMode::Exhaustive, 10, &mut r),
            Err(Error::Resource(_))
        ));
        assert!(audit_subset_density(&g, 0.0, 0.1, AuditMode::Exhaustive, 10, &mut r).is_err());
        assert!(audit_subset_density(&g, 0.5, 0.0, AuditMode::Exhaustive, 10, &mut r).is_err());
        let tiny = audit_subset_density(&g, 0.2, 0.1, AuditMode::Exhaustive, 10, &mut r).unwrap();
        assert_eq!(tiny.max_size, 1);
        assert!(!tiny.violated && tiny.worst_subset.is_empty());
    }
}
