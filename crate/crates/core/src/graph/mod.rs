//! Random d-regular graphs.
//!
//! Graphs are produced by the random pairing (configuration) model: every
//! vertex owns `d` half-edges, a uniform perfect matching of all half-edges
//! is drawn and projected onto the vertex set. Conditioning on a simple
//! projection gives the uniform measure on simple d-regular graphs.

mod audit;
mod pairing;
mod text;

pub use audit::{audit_subset_density, AuditMode, AuditReduction, AuditReport};
pub use pairing::{
    default_max_attempts, density_tail_bound, generate_pairing, sample_graph,
    sample_regular_graph, sample_regular_graph_incremental, GraphSample, HalfEdge,
    PairingOutcome, SamplerKind,
};

use crate::error::{precondition, Result};

/// Immutable simple d-regular graph on vertices `0..n`.
///
/// Edges are stored with the smaller endpoint first and sorted
/// lexicographically, so two graphs with the same edge set compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    edges: Vec<(u32, u32)>,
    // `incidence[v * d .. (v + 1) * d]` are the indices of the edges touching `v`.
    incidence: Vec<u32>,
}

impl RegularGraph {
    /// Builds a graph from an edge list, checking regularity and simplicity.
    pub fn from_edges(n: usize, d: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if n == 0 {
            return Err(precondition("graph needs at least one vertex"));
        }
        if n > u32::MAX as usize {
            return Err(precondition("vertex count exceeds u32 range"));
        }
        let mut edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(precondition(format!("duplicate edge {{{}, {}}}", w[0].0, w[0].1)));
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            if u == v {
                return Err(precondition(format!("loop at vertex {u}")));
            }
            if v as usize >= n {
                return Err(precondition(format!("edge endpoint {v} out of range for n = {n}")));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        if let Some((v, &k)) = degree.iter().enumerate().find(|(_, &k)| k != d) {
            return Err(precondition(format!("vertex {v} has degree {k}, expected {d}")));
        }
        let mut incidence = vec![0u32; n * d];
        let mut fill = vec![0usize; n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            for x in [u as usize, v as usize] {
                incidence[x * d + fill[x]] = i as u32;
                fill[x] += 1;
            }
        }
        Ok(Self { n, d, edges, incidence })
    }

    /// Complete graph `K_n`, which is `(n - 1)`-regular.
    pub fn complete(n: usize) -> Result<Self> {
        let n32 = n as u32;
        let edges = (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v)));
        Self::from_edges(n, n.saturating_sub(1), edges)
    }

    /// Cycle graph `C_n` (n ≥ 3).
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(precondition("a simple cycle needs n >= 3"));
        }
        let n32 = n as u32;
        Self::from_edges(n, 2, (0..n32).map(|u| (u, (u + 1) % n32)))
    }

    /// Complete bipartite graph `K_{k,k}` with parts `0..k` and `k..2k`.
    pub fn complete_bipartite(k: usize) -> Result<Self> {
        let k32 = k as u32;
        let edges = (0..k32).flat_map(|u| (k32..2 * k32).map(move |v| (u, v)));
        Self::from_edges(2 * k, k, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (u32, u32) {
        self.edges[index]
    }

    /// Indices of the edges touching `v`.
    pub fn incident(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.incidence[v * self.d..(v + 1) * self.d]
    }

    /// Neighbours of `v`.
    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.incident(v).iter().map(move |&e| {
            let (a, b) = self.edges[e as usize];
            if a == v {
                b
            } else {
                a
            }
        })
    }

    /// Index of edge `{x, y}`, if present.
    pub fn edge_index(&self, x: u32, y: u32) -> Option<usize> {
        if x as usize >= self.n || y as usize >= self.n {
            return None;
        }
        let key = if x <= y { (x, y) } else { (y, x) };
        self.incident(x)
            .iter()
            .map(|&e| e as usize)
            .find(|&e| self.edges[e] == key)
    }

    pub fn has_edge(&self, x: u32, y: u32) -> bool {
        self.edge_index(x, y).is_some()
    }

    /// Number of edges with both endpoints in `subset` (vertices must be distinct).
    pub fn induced_edge_count(&self, subset: &[u32]) -> usize {
        let mut member = vec![false; self.n];
        for &v in subset {
            member[v as usize] = true;
        }
        self.edges
            .iter()
            .filter(|&&(u, v)| member[u as usize] && member[v as usize])
            .count()
    }
}
