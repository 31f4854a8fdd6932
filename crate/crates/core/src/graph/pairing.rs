use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;

use super::RegularGraph;
use crate::error::{precondition, Error, Result};

/// A half-edge: slot `slot` (0-based, `< d`) of `vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub vertex: u32,
    pub slot: u32,
}

/// A perfect matching of the `n·d` half-edges.
#[derive(Debug, Clone)]
pub struct PairingOutcome {
    pub n: usize,
    pub d: usize,
    pub pairs: Vec<(HalfEdge, HalfEdge)>,
    /// No loops and no multi-edges after projection.
    pub is_simple: bool,
}

impl PairingOutcome {
    /// Projected multigraph edges, smaller endpoint first, in pairing order.
    pub fn projected_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.pairs.iter().map(|(a, b)| {
            if a.vertex <= b.vertex {
                (a.vertex, b.vertex)
            } else {
                (b.vertex, a.vertex)
            }
        })
    }

    /// Number of projected edges (loops and repeats included) with both endpoints in `subset`.
    pub fn edges_within(&self, subset: &[u32]) -> usize {
        let mut member = vec![false; self.n];
        for &v in subset {
            member[v as usize] = true;
        }
        self.projected_edges()
            .filter(|&(u, v)| member[u as usize] && member[v as usize])
            .count()
    }

    pub fn into_graph(self) -> Result<RegularGraph> {
        if !self.is_simple {
            return Err(precondition("pairing projects to a multigraph"));
        }
        let edges: Vec<_> = self.projected_edges().collect();
        RegularGraph::from_edges(self.n, self.d, edges)
    }
}

fn check_params(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(precondition("n and d must be positive"));
    }
    if (n * d) % 2 != 0 {
        return Err(precondition(format!("n·d = {} is odd", n * d)));
    }
    if d >= n {
        return Err(precondition(format!("no simple {d}-regular graph on {n} vertices")));
    }
    if n * d > u32::MAX as usize {
        return Err(precondition("n·d exceeds u32 range"));
    }
    Ok(())
}

/// Draws a uniform perfect matching of the half-edges.
///
/// The half-edges are shuffled uniformly and paired consecutively.
pub fn generate_pairing<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<PairingOutcome> {
    check_params(n, d)?;
    let mut points: Vec<u32> = (0..(n * d) as u32).collect();
    points.shuffle(rng);
    let d32 = d as u32;
    let half = |p: u32| HalfEdge { vertex: p / d32, slot: p % d32 };
    let pairs: Vec<_> = points.chunks_exact(2).map(|c| (half(c[0]), half(c[1]))).collect();

    let mut keys: Vec<u64> = Vec::with_capacity(pairs.len());
    let mut is_simple = true;
    for (a, b) in &pairs {
        if a.vertex == b.vertex {
            is_simple = false;
            break;
        }
        let (u, v) = (a.vertex.min(b.vertex), a.vertex.max(b.vertex));
        keys.push(((u as u64) << 32) | v as u64);
    }
    if is_simple {
        keys.sort_unstable();
        is_simple = keys.windows(2).all(|w| w[0] != w[1]);
    }
    Ok(PairingOutcome { n, d, pairs, is_simple })
}

/// `10·⌈e^{(d²−1)/4}⌉`: ten times the asymptotic mean number of pairings
/// needed before one projects to a simple graph.
pub fn default_max_attempts(d: usize) -> u64 {
    let expected = (((d * d) as f64 - 1.0) / 4.0).exp().ceil();
    (10.0 * expected).min(u64::MAX as f64 / 2.0) as u64
}

/// A sampled graph together with the number of pairings (or restarts) it took.
#[derive(Debug, Clone)]
pub struct GraphSample {
    pub graph: RegularGraph,
    pub attempts: u64,
}

/// Exactly uniform simple d-regular graph by rejection of non-simple pairings.
pub fn sample_regular_graph<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
    max_attempts: Option<u64>,
) -> Result<GraphSample> {
    check_params(n, d)?;
    let limit = max_attempts.unwrap_or_else(|| default_max_attempts(d));
    for attempt in 1..=limit {
        let outcome = generate_pairing(n, d, rng)?;
        if outcome.is_simple {
            return Ok(GraphSample { graph: outcome.into_graph()?, attempts: attempt });
        }
    }
    Err(Error::Resource(format!(
        "no simple pairing for n = {n}, d = {d} after {limit} attempts"
    )))
}

/// Simple d-regular graph by incremental pairing with restarts.
///
/// Unpaired points are repeatedly shuffled and paired; pairs that would form
/// a loop or a repeated edge are returned to the pool. When the pool can no
/// longer be completed the whole construction restarts. The output is only
/// asymptotically uniform, but the expected work stays near-linear for degrees
/// where rejection sampling is hopeless (`e^{(d²−1)/4}` attempts).
pub fn sample_regular_graph_incremental<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    rng: &mut R,
    max_restarts: u64,
) -> Result<GraphSample> {
    check_params(n, d)?;
    for attempt in 1..=max_restarts.max(1) {
        if let Some(edges) = try_incremental(n, d, rng) {
            let graph = RegularGraph::from_edges(n, d, edges)?;
            return Ok(GraphSample { graph, attempts: attempt });
        }
    }
    Err(Error::Resource(format!(
        "incremental pairing failed for n = {n}, d = {d} after {max_restarts} restarts"
    )))
}

fn try_incremental<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Option<Vec<(u32, u32)>> {
    let mut edges: HashSet<(u32, u32)> = HashSet::with_capacity(n * d / 2);
    let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        let mut leftover: Vec<u32> = Vec::new();
        for c in stubs.chunks_exact(2) {
            let (u, v) = (c[0].min(c[1]), c[0].max(c[1]));
            if u != v && edges.insert((u, v)) {
                continue;
            }
            leftover.push(u);
            leftover.push(v);
        }
        if !leftover.is_empty() && !completable(&edges, &leftover) {
            return None;
        }
        stubs = leftover;
    }
    let mut out: Vec<_> = edges.into_iter().collect();
    out.sort_unstable();
    Some(out)
}

// Some pair of remaining points can still be joined.
fn completable(edges: &HashSet<(u32, u32)>, stubs: &[u32]) -> bool {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for &s in stubs {
        *counts.entry(s).or_default() += 1;
    }
    let mut vertices: Vec<u32> = counts.into_keys().collect();
    vertices.sort_unstable();
    for (i, &u) in vertices.iter().enumerate() {
        for &v in &vertices[i + 1..] {
            if !edges.contains(&(u, v)) {
                return true;
            }
        }
    }
    false
}

/// Graph sampling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    /// Exact rejection sampling.
    Rejection,
    /// Incremental pairing with restarts.
    Incremental,
    /// Rejection while the expected number of attempts stays below
    /// [`AUTO_REJECTION_LIMIT`], incremental otherwise.
    Auto,
}

pub const AUTO_REJECTION_LIMIT: f64 = 1000.0;

impl SamplerKind {
    pub fn resolve(self, d: usize) -> SamplerKind {
        match self {
            SamplerKind::Auto => {
                if (((d * d) as f64 - 1.0) / 4.0).exp() <= AUTO_REJECTION_LIMIT {
                    SamplerKind::Rejection
                } else {
                    SamplerKind::Incremental
                }
            }
            other => other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Rejection => "rejection",
            SamplerKind::Incremental => "incremental",
            SamplerKind::Auto => "auto",
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rejection" => Ok(SamplerKind::Rejection),
            "incremental" => Ok(SamplerKind::Incremental),
            "auto" => Ok(SamplerKind::Auto),
            other => Err(Error::Config(format!("unknown sampler '{other}'"))),
        }
    }
}

pub fn sample_graph<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    kind: SamplerKind,
    rng: &mut R,
) -> Result<GraphSample> {
    match kind.resolve(d) {
        SamplerKind::Incremental => sample_regular_graph_incremental(n, d, rng, 1000),
        _ => sample_regular_graph(n, d, rng, None),
    }
}

/// Upper bound on the probability that a fixed set of `v` vertices spans at
/// least `(1+ε)v` edges in the pairing model:
/// `exp(−log(εn/(2dv))·(1+ε/2)·v)`.
///
/// Requires `v/n ≤ ε/(2d)` and `v/n ≤ 1/2`.
pub fn density_tail_bound(v: usize, n: usize, d: usize, epsilon: f64) -> Result<f64> {
    if v == 0 || n == 0 || d == 0 || !(epsilon > 0.0) {
        return Err(precondition("v, n, d and epsilon must be positive"));
    }
    let ratio = v as f64 / n as f64;
    if ratio > 0.5 || ratio > epsilon / (2.0 * d as f64) {
        return Err(precondition(format!(
            "v/n = {ratio} must not exceed min(1/2, ε/(2d) = {})",
            epsilon / (2.0 * d as f64)
        )));
    }
    let lambda = (epsilon * n as f64 / (2.0 * d as f64 * v as f64)).ln();
    Ok((-lambda * (1.0 + epsilon / 2.0) * v as f64).exp())
}
