//! Permutations of a graph's vertices with a live cycle decomposition.
//!
//! A [`PermutationState`] tracks, under left multiplication by transpositions
//! of graph edges, the number of cycles `N(σ)`, the largest cycle and the
//! number of graph edges whose endpoints share a cycle (`|E_=|`).
//!
//! Applying the transposition of edge `{x, y}` splits the common cycle of
//! `x` and `y` when they share one and merges their two cycles otherwise, so
//! `N` always moves by exactly one. Both cases cost time proportional to the
//! smaller of the two cycles involved (times `d` for the edge count).

use std::sync::Arc;

use crate::error::{precondition, Result};
use crate::graph::RegularGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaKind {
    Split,
    Merge,
}

/// Effect of one transposition on the cycle structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaRecord {
    pub kind: DeltaKind,
    pub edge: (u32, u32),
    pub n_before: usize,
    pub n_after: usize,
    pub same_cycle_delta: i64,
}

/// Cycle statistics recomputed from scratch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleCensus {
    pub num_cycles: usize,
    pub largest_cycle: usize,
    pub same_cycle_edges: usize,
}

#[derive(Debug, Clone)]
pub struct PermutationState {
    graph: Arc<RegularGraph>,
    image: Vec<u32>,
    inverse: Vec<u32>,
    cycle_id: Vec<u32>,
    // Indexed by cycle label; zero for unused labels.
    cycle_size: Vec<u32>,
    free_labels: Vec<u32>,
    // size_count[s] = number of cycles of size s.
    size_count: Vec<u32>,
    num_cycles: usize,
    largest_cycle: usize,
    same_cycle_edges: usize,
}

impl PermutationState {
    /// The identity permutation: `n` singleton cycles.
    pub fn identity(graph: Arc<RegularGraph>) -> Self {
        let n = graph.n();
        let ids: Vec<u32> = (0..n as u32).collect();
        let mut size_count = vec![0; n + 1];
        size_count[1] = n as u32;
        Self {
            graph,
            image: ids.clone(),
            inverse: ids.clone(),
            cycle_id: ids,
            cycle_size: vec![1; n],
            free_labels: Vec::with_capacity(n),
            size_count,
            num_cycles: n,
            largest_cycle: 1,
            same_cycle_edges: 0,
        }
    }

    /// State for an arbitrary permutation given by `image[v] = σ(v)`.
    pub fn from_image(graph: Arc<RegularGraph>, image: Vec<u32>) -> Result<Self> {
        let n = graph.n();
        if image.len() != n {
            return Err(precondition(format!("image has length {}, expected {n}", image.len())));
        }
        let mut inverse = vec![u32::MAX; n];
        for (v, &w) in image.iter().enumerate() {
            if w as usize >= n || inverse[w as usize] != u32::MAX {
                return Err(precondition("image is not a bijection"));
            }
            inverse[w as usize] = v as u32;
        }
        let mut cycle_id = vec![u32::MAX; n];
        let mut cycle_size = vec![0u32; n];
        let mut size_count = vec![0u32; n + 1];
        let mut label = 0u32;
        for start in 0..n {
            if cycle_id[start] != u32::MAX {
                continue;
            }
            let mut v = start;
            let mut len = 0;
            while cycle_id[v] == u32::MAX {
                cycle_id[v] = label;
                len += 1;
                v = image[v] as usize;
            }
            cycle_size[label as usize] = len;
            size_count[len as usize] += 1;
            label += 1;
        }
        let same_cycle_edges = graph
            .edges()
            .iter()
            .filter(|&&(u, v)| cycle_id[u as usize] == cycle_id[v as usize])
            .count();
        let largest_cycle = cycle_size.iter().copied().max().unwrap_or(0) as usize;
        Ok(Self {
            free_labels: (label..n as u32).rev().collect(),
            graph,
            image,
            inverse,
            cycle_id,
            cycle_size,
            size_count,
            num_cycles: label as usize,
            largest_cycle,
            same_cycle_edges,
        })
    }

    pub fn graph(&self) -> &Arc<RegularGraph> {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// `σ(v)` for every vertex.
    pub fn image(&self) -> &[u32] {
        &self.image
    }

    pub fn inverse(&self) -> &[u32] {
        &self.inverse
    }

    pub fn cycle_label(&self, v: u32) -> u32 {
        self.cycle_id[v as usize]
    }

    pub fn cycle_size_of(&self, v: u32) -> usize {
        self.cycle_size[self.cycle_id[v as usize] as usize] as usize
    }

    /// `N(σ)`.
    pub fn num_cycles(&self) -> usize {
        self.num_cycles
    }

    pub fn largest_cycle(&self) -> usize {
        self.largest_cycle
    }

    /// `|E_=|`: edges with both endpoints in one cycle.
    pub fn same_cycle_edges(&self) -> usize {
        self.same_cycle_edges
    }

    pub fn largest_cycle_fraction(&self) -> f64 {
        self.largest_cycle as f64 / self.n() as f64
    }

    /// Cycle sizes in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.num_cycles);
        for (size, &count) in self.size_count.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(size, count as usize));
        }
        out
    }

    /// True when σ is an even permutation.
    pub fn is_even(&self) -> bool {
        (self.n() - self.num_cycles) % 2 == 0
    }

    /// Replaces σ by `τ_{x,y}∘σ` for the edge `{x, y}`.
    pub fn apply_transposition(&mut self, x: u32, y: u32) -> Result<DeltaRecord> {
        match self.graph.edge_index(x, y) {
            Some(e) if x != y => Ok(self.apply_edge(e)),
            _ => Err(precondition(format!("{{{x}, {y}}} is not an edge of the graph"))),
        }
    }

    /// Replaces σ by `τ_e∘σ` for the edge with index `e`.
    pub fn apply_edge(&mut self, e: usize) -> DeltaRecord {
        let (x, y) = self.graph.edge(e);
        let n_before = self.num_cycles;
        let same = self.cycle_id[x as usize] == self.cycle_id[y as usize];

        // τ∘σ: whatever mapped to x now maps to y and vice versa.
        let (a, b) = (self.inverse[x as usize], self.inverse[y as usize]);
        self.image[a as usize] = y;
        self.image[b as usize] = x;
        self.inverse[y as usize] = a;
        self.inverse[x as usize] = b;

        let same_cycle_delta = if same { -(self.split(x, y) as i64) } else { self.merge(x, y) as i64 };
        self.same_cycle_edges = (self.same_cycle_edges as i64 + same_cycle_delta) as usize;
        DeltaRecord {
            kind: if same { DeltaKind::Split } else { DeltaKind::Merge },
            edge: (x, y),
            n_before,
            n_after: self.num_cycles,
            same_cycle_delta,
        }
    }

    // Returns the number of edges that became same-cycle.
    fn merge(&mut self, x: u32, y: u32) -> usize {
        let (lx, ly) = (self.cycle_id[x as usize], self.cycle_id[y as usize]);
        let (sx, sy) = (self.cycle_size[lx as usize], self.cycle_size[ly as usize]);
        let (small_start, small, large) = if sx <= sy { (x, lx, ly) } else { (y, ly, lx) };
        let (s_small, s_large) = (sx.min(sy), sx.max(sy));

        // In the merged orbit the old members of each cycle are contiguous,
        // starting from x (resp. y).
        let mut crossing = 0usize;
        let mut v = small_start;
        for _ in 0..s_small {
            crossing += self
                .graph
                .neighbors(v)
                .filter(|&u| self.cycle_id[u as usize] == large)
                .count();
            v = self.image[v as usize];
        }
        v = small_start;
        for _ in 0..s_small {
            self.cycle_id[v as usize] = large;
            v = self.image[v as usize];
        }

        let merged = s_small + s_large;
        self.cycle_size[large as usize] = merged;
        self.cycle_size[small as usize] = 0;
        self.free_labels.push(small);
        self.size_count[s_small as usize] -= 1;
        self.size_count[s_large as usize] -= 1;
        self.size_count[merged as usize] += 1;
        self.largest_cycle = self.largest_cycle.max(merged as usize);
        self.num_cycles -= 1;
        crossing
    }

    // Returns the number of edges that stopped being same-cycle.
    fn split(&mut self, x: u32, y: u32) -> usize {
        let old = self.cycle_id[x as usize];
        let total = self.cycle_size[old as usize];

        // Walk both new orbits in lockstep; the first to close is the smaller.
        let (mut p, mut q) = (x, y);
        let mut steps = 0u32;
        let small_start = loop {
            steps += 1;
            p = self.image[p as usize];
            if p == x {
                break x;
            }
            q = self.image[q as usize];
            if q == y {
                break y;
            }
        };
        let small_size = steps;

        let label = self.free_labels.pop().expect("fewer than n cycles before a split");
        let mut v = small_start;
        loop {
            self.cycle_id[v as usize] = label;
            v = self.image[v as usize];
            if v == small_start {
                break;
            }
        }
        let mut crossing = 0usize;
        loop {
            crossing += self.graph.neighbors(v).filter(|&u| self.cycle_id[u as usize] == old).count();
            v = self.image[v as usize];
            if v == small_start {
                break;
            }
        }

        let rest = total - small_size;
        self.cycle_size[label as usize] = small_size;
        self.cycle_size[old as usize] = rest;
        self.size_count[total as usize] -= 1;
        self.size_count[small_size as usize] += 1;
        self.size_count[rest as usize] += 1;
        while self.size_count[self.largest_cycle] == 0 {
            self.largest_cycle -= 1;
        }
        self.num_cycles += 1;
        crossing
    }

    /// `|E_=|` recomputed from freshly traced orbits.
    pub fn brute_force_same_cycle_count(&self) -> usize {
        self.brute_force_census().same_cycle_edges
    }

    /// All cycle statistics recomputed from the image alone.
    pub fn brute_force_census(&self) -> CycleCensus {
        let n = self.n();
        let mut orbit = vec![usize::MAX; n];
        let mut num_cycles = 0;
        let mut largest_cycle = 0;
        for start in 0..n {
            if orbit[start] != usize::MAX {
                continue;
            }
            let mut len = 0;
            let mut v = start;
            while orbit[v] == usize::MAX {
                orbit[v] = num_cycles;
                len += 1;
                v = self.image[v] as usize;
            }
            largest_cycle = largest_cycle.max(len);
            num_cycles += 1;
        }
        let same_cycle_edges = self
            .graph
            .edges()
            .iter()
            .filter(|&&(u, v)| orbit[u as usize] == orbit[v as usize])
            .count();
        CycleCensus { num_cycles, largest_cycle, same_cycle_edges }
    }

    pub fn census(&self) -> CycleCensus {
        CycleCensus {
            num_cycles: self.num_cycles,
            largest_cycle: self.largest_cycle,
            same_cycle_edges: self.same_cycle_edges,
        }
    }

    /// Full structural check of the incremental bookkeeping (test support).
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let n = self.n();
        for v in 0..n {
            if self.inverse[self.image[v] as usize] as usize != v {
                return Err(format!("inverse broken at {v}"));
            }
            if self.cycle_id[self.image[v] as usize] != self.cycle_id[v] {
                return Err(format!("cycle label changes along the orbit of {v}"));
            }
        }
        let mut sizes = vec![0u32; n];
        for &l in &self.cycle_id {
            sizes[l as usize] += 1;
        }
        if sizes != self.cycle_size {
            return Err("cycle_size disagrees with labels".into());
        }
        if sizes.iter().filter(|&&s| s > 0).count() != self.num_cycles {
            return Err("two orbits share a label".into());
        }
        if self.brute_force_census() != self.census() {
            return Err(format!("census {:?} vs {:?}", self.census(), self.brute_force_census()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_regular_graph;
    use crate::rng;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn k(n: usize) -> Arc<RegularGraph> {
        Arc::new(RegularGraph::complete(n).unwrap())
    }

    #[test]
    fn identity_state() {
        let s = PermutationState::identity(k(4));
        assert_eq!(s.num_cycles(), 4);
        assert_eq!(s.same_cycle_edges(), 0);
        assert_eq!(s.largest_cycle_fraction(), 0.25);
        assert_eq!(s.brute_force_same_cycle_count(), 0);
        s.check_consistency().unwrap();
    }

    #[test]
    fn merge_of_two_singletons() {
        let mut s = PermutationState::identity(k(4));
        let delta = s.apply_transposition(1, 2).unwrap();
        assert_eq!(delta.kind, DeltaKind::Merge);
        assert_eq!((delta.n_before, delta.n_after), (4, 3));
        assert_eq!(delta.same_cycle_delta, 1);
        // σ = τ_{1,2}: σ(1) = 2, σ(2) = 1.
        assert_eq!(s.image(), &[0, 2, 1, 3]);
        s.check_consistency().unwrap();
    }

    #[test]
    fn three_cycle_on_triangle_splits() {
        // σ = (0 1 2): 0 → 1 → 2 → 0.
        let g = k(3);
        let mut s = PermutationState::from_image(g, vec![1, 2, 0]).unwrap();
        assert_eq!(s.num_cycles(), 1);
        assert_eq!(s.same_cycle_edges(), 3);
        let delta = s.apply_transposition(0, 1).unwrap();
        assert_eq!(delta.kind, DeltaKind::Split);
        assert_eq!(s.num_cycles(), 2);
        // τ_{0,1}∘σ: 0 → τ(1) = 0, 1 → τ(2) = 2, 2 → τ(0) = 1.
        assert_eq!(s.image(), &[0, 2, 1]);
        assert_eq!(s.same_cycle_edges(), 1);
        s.check_consistency().unwrap();
    }

    #[test]
    fn transposition_is_an_involution() {
        let mut r = rng::stream(21, 0);
        let g = Arc::new(sample_regular_graph(30, 3, &mut r, None).unwrap().graph);
        let mut s = PermutationState::identity(g.clone());
        for _ in 0..200 {
            s.apply_edge(r.random_range(0..g.num_edges()));
        }
        let before = (s.census(), s.cycle_type(), s.image().to_vec());
        let e = r.random_range(0..g.num_edges());
        s.apply_edge(e);
        s.apply_edge(e);
        assert_eq!(before, (s.census(), s.cycle_type(), s.image().to_vec()));
    }

    #[test]
    fn brute_force_examples() {
        // Single n-cycle: every edge is same-cycle.
        let g = k(5);
        let s = PermutationState::from_image(g.clone(), vec![1, 2, 3, 4, 0]).unwrap();
        assert_eq!(s.brute_force_same_cycle_count(), g.num_edges());
        assert_eq!(s.largest_cycle_fraction(), 1.0);
        let k2 = k(2);
        let s = PermutationState::from_image(k2, vec![1, 0]).unwrap();
        assert_eq!(s.brute_force_same_cycle_count(), 1);
    }

    #[test]
    fn cycle_type_and_fraction() {
        let g = k(6);
        // (0 1 2)(3 4)(5)
        let s = PermutationState::from_image(g, vec![1, 2, 0, 4, 3, 5]).unwrap();
        assert_eq!(s.cycle_type(), vec![3, 2, 1]);
        assert_eq!(s.largest_cycle_fraction(), 0.5);
        assert!(!s.is_even());
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Arc::new(RegularGraph::cycle(5).unwrap());
        let mut s = PermutationState::identity(g.clone());
        assert!(s.apply_transposition(0, 2).is_err());
        assert!(s.apply_transposition(0, 0).is_err());
        assert!(s.apply_transposition(0, 9).is_err());
        assert!(PermutationState::from_image(g.clone(), vec![0, 0, 1, 2, 3]).is_err());
        assert!(PermutationState::from_image(g, vec![0, 1]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn incremental_matches_brute_force(seed in any::<u64>(), half_n in 2usize..32, d in 1usize..5) {
            let n = 2 * half_n;
            prop_assume!(d < n);
            let mut r = rng::stream(seed, 0);
            let g = Arc::new(sample_regular_graph(n, d, &mut r, Some(100_000)).unwrap().graph);
            let mut image: Vec<u32> = (0..n as u32).collect();
            image.shuffle(&mut r);
            let mut s = PermutationState::from_image(g.clone(), image).unwrap();
            for _ in 0..40 {
                let e = r.random_range(0..g.num_edges());
                let (x, y) = g.edge(e);
                let was_same = s.cycle_label(x) == s.cycle_label(y);
                let before = s.num_cycles();
                let delta = s.apply_edge(e);
                let expected = if was_same { before + 1 } else { before - 1 };
                prop_assert_eq!(s.num_cycles(), expected);
                prop_assert_eq!(delta.n_after, expected);
                prop_assert!(s.check_consistency().is_ok(), "{:?}", s.check_consistency());
                prop_assert!(s.num_cycles() >= 1 && s.num_cycles() <= n);
                prop_assert!(s.same_cycle_edges() <= g.num_edges());
            }
        }
    }
}
