//! Exact computations on the full chain over all `n!` permutations.
//!
//! States are indexed by Lehmer code. Transient distributions come from
//! uniformization; a dense matrix exponential is available as an
//! independent cross-check on very small chains.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{precondition, Error, Result};
use crate::graph::RegularGraph;
use crate::process::has_macroscopic_cycle;
use crate::theory::{BoundParams, BoundReport, Relation};

/// Default limit on the number of states (`8!`).
pub const DEFAULT_STATE_GUARD: usize = 40_320;

/// Largest chain accepted by [`ExactChain::dense_distribution_at`].
pub const DENSE_STATE_LIMIT: usize = 720;

/// Poisson tail mass left out by uniformization.
pub const UNIFORMIZATION_TAIL: f64 = 1e-14;

const PARALLEL_STATES: usize = 5040;

fn factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// Lehmer-code rank of a permutation of `0..n`.
pub fn lehmer_rank(perm: &[u32]) -> usize {
    let n = perm.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// Inverse of [`lehmer_rank`].
pub fn lehmer_unrank(mut rank: usize, n: usize) -> Vec<u32> {
    let mut digits = vec![0usize; n];
    for i in (0..n).rev() {
        let base = n - i;
        digits[i] = rank % base;
        rank /= base;
    }
    let mut pool: Vec<u32> = (0..n as u32).collect();
    digits.into_iter().map(|c| pool.remove(c)).collect()
}

/// Orbit labels of `image`, in order of first appearance.
fn orbit_labels(image: &[u32]) -> (Vec<u32>, usize) {
    let mut label = vec![u32::MAX; image.len()];
    let mut count = 0;
    for start in 0..image.len() {
        if label[start] != u32::MAX {
            continue;
        }
        let mut v = start;
        while label[v] == u32::MAX {
            label[v] = count as u32;
            v = image[v] as usize;
        }
        count += 1;
    }
    (label, count)
}

/// The interchange chain on all permutations of a small graph.
#[derive(Debug, Clone)]
pub struct ExactChain {
    n: usize,
    edges: Vec<(u32, u32)>,
    /// `transitions[s·|E| + e]` is the state reached from `s` through edge `e`.
    transitions: Vec<u32>,
    num_cycles: Vec<u32>,
    same_cycle_edges: Vec<u32>,
    largest_cycle: Vec<u32>,
}

impl ExactChain {
    /// Builds the chain, refusing graphs with more than `state_guard` states.
    pub fn build(g: &RegularGraph, state_guard: usize) -> Result<Self> {
        let n = g.n();
        let states = factorial(n)
            .filter(|&s| s <= state_guard)
            .ok_or_else(|| Error::Resource(format!("{n}! states exceeds the guard of {state_guard}")))?;
        let edges = g.edges().to_vec();
        let m = edges.len();
        let rows: Vec<(Vec<u32>, u32, u32, u32)> = (0..states)
            .into_par_iter()
            .map(|s| {
                let image = lehmer_unrank(s, n);
                let (label, count) = orbit_labels(&image);
                let mut sizes = vec![0u32; count];
                for &l in &label {
                    sizes[l as usize] += 1;
                }
                let same = edges.iter().filter(|&&(x, y)| label[x as usize] == label[y as usize]).count();
                let mut targets = Vec::with_capacity(m);
                let mut next = image.clone();
                for &(x, y) in &edges {
                    for (w, &v) in next.iter_mut().zip(&image) {
                        *w = if v == x { y } else if v == y { x } else { v };
                    }
                    targets.push(lehmer_rank(&next) as u32);
                }
                (targets, count as u32, same as u32, sizes.into_iter().max().unwrap_or(0))
            })
            .collect();
        let mut chain = ExactChain {
            n,
            edges,
            transitions: Vec::with_capacity(states * m),
            num_cycles: Vec::with_capacity(states),
            same_cycle_edges: Vec::with_capacity(states),
            largest_cycle: Vec::with_capacity(states),
        };
        for (targets, count, same, largest) in rows {
            chain.transitions.extend(targets);
            chain.num_cycles.push(count);
            chain.same_cycle_edges.push(same);
            chain.largest_cycle.push(largest);
        }
        Ok(chain)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.num_cycles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Index of the identity permutation.
    pub fn identity(&self) -> usize {
        0
    }

    pub fn permutation(&self, state: usize) -> Vec<u32> {
        lehmer_unrank(state, self.n)
    }

    pub fn state_of(&self, perm: &[u32]) -> usize {
        lehmer_rank(perm)
    }

    /// States reachable in one jump, indexed by edge.
    pub fn successors(&self, state: usize) -> &[u32] {
        let m = self.num_edges();
        &self.transitions[state * m..(state + 1) * m]
    }

    pub fn num_cycles(&self, state: usize) -> usize {
        self.num_cycles[state] as usize
    }

    pub fn same_cycle_edges(&self, state: usize) -> usize {
        self.same_cycle_edges[state] as usize
    }

    pub fn largest_cycle(&self, state: usize) -> usize {
        self.largest_cycle[state] as usize
    }

    pub fn is_even(&self, state: usize) -> bool {
        (self.n - self.num_cycles(state)) % 2 == 0
    }

    /// `v ↦ v·(I + Q/|E|)`. The kernel is symmetric since every jump is an involution.
    fn kernel_step(&self, v: &[f64]) -> Vec<f64> {
        let inv = 1.0 / self.num_edges() as f64;
        self.map_states(|j| self.successors(j).iter().map(|&i| v[i as usize]).sum::<f64>() * inv)
    }

    fn map_states(&self, f: impl Fn(usize) -> f64 + Sync + Send) -> Vec<f64> {
        if self.num_states() >= PARALLEL_STATES {
            (0..self.num_states()).into_par_iter().map(f).collect()
        } else {
            (0..self.num_states()).map(f).collect()
        }
    }

    /// `v ↦ v·Q`.
    pub fn generator_action(&self, v: &[f64]) -> Vec<f64> {
        let m = self.num_edges() as f64;
        self.map_states(|j| self.successors(j).iter().map(|&i| v[i as usize]).sum::<f64>() - m * v[j])
    }

    /// Law of `X_t` started from the identity.
    pub fn distribution_at(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        let states = self.num_states();
        let mut v = vec![0.0; states];
        v[self.identity()] = 1.0;
        let lambda = self.num_edges() as f64 * t;
        if lambda == 0.0 {
            return Ok(v);
        }
        let mut out = vec![0.0; states];
        let mut log_w = -lambda;
        let mut k = 0u64;
        loop {
            let w = log_w.exp();
            for (o, x) in out.iter_mut().zip(&v) {
                *o += w * x;
            }
            // Past the mode the tail is dominated by a geometric series.
            let ratio = lambda / (k + 2) as f64;
            if ratio < 1.0 && w * lambda / (k + 1) as f64 / (1.0 - ratio) < UNIFORMIZATION_TAIL {
                break;
            }
            k += 1;
            log_w += lambda.ln() - (k as f64).ln();
            v = self.kernel_step(&v);
        }
        Ok(out)
    }

    /// Law of `X_t` from the dense matrix exponential of `tQ`.
    pub fn dense_distribution_at(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        let states = self.num_states();
        if states > DENSE_STATE_LIMIT {
            return Err(Error::Resource(format!("dense exponential limited to {DENSE_STATE_LIMIT} states")));
        }
        let m = self.num_edges() as f64;
        let mut q = DMatrix::<f64>::zeros(states, states);
        for s in 0..states {
            q[(s, s)] = -m * t;
            for &target in self.successors(s) {
                q[(s, target as usize)] += t;
            }
        }
        let e = q.exp();
        Ok((0..states).map(|j| e[(self.identity(), j)]).collect())
    }

    fn expect(&self, p: &[f64], f: impl Fn(usize) -> f64) -> f64 {
        p.iter().enumerate().map(|(s, &x)| x * f(s)).sum()
    }

    /// `Z_θ(t) = E[θ^{N(X_t)}]`.
    pub fn partition(&self, theta: f64, t: f64) -> Result<f64> {
        check_theta(theta)?;
        let p = self.distribution_at(t)?;
        Ok(self.expect(&p, |s| theta.powi(self.num_cycles[s] as i32)))
    }

    /// `E[N(X_t)]`.
    pub fn mean_cycles(&self, t: f64) -> Result<f64> {
        let p = self.distribution_at(t)?;
        Ok(self.expect(&p, |s| self.num_cycles[s] as f64))
    }

    /// `P_{θ,t}(A_η)`.
    pub fn weighted_prob(&self, theta: f64, t: f64, eta: f64) -> Result<f64> {
        check_theta(theta)?;
        check_eta(eta)?;
        let p = self.distribution_at(t)?;
        Ok(self.weighted_prob_from(&p, theta, eta))
    }

    fn weighted_prob_from(&self, p: &[f64], theta: f64, eta: f64) -> f64 {
        let w = |s: usize| theta.powi(self.num_cycles[s] as i32);
        let z = self.expect(p, w);
        self.expect(p, |s| if has_macroscopic_cycle(self.largest_cycle(s), self.n, eta) { w(s) } else { 0.0 }) / z
    }

    /// `∫_a^b P_{θ,t}(A_η) dt` by composite Simpson with `panels` (even) panels.
    pub fn weighted_time_integral(&self, theta: f64, a: f64, b: f64, eta: f64, panels: usize) -> Result<f64> {
        check_theta(theta)?;
        check_eta(eta)?;
        if !(a >= 0.0 && a < b && b.is_finite()) {
            return Err(precondition(format!("need 0 ≤ a < b, got a = {a}, b = {b}")));
        }
        if panels < 2 || panels % 2 == 1 {
            return Err(precondition("panels must be even and at least 2"));
        }
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for k in 0..=panels {
            let c = if k == 0 || k == panels { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let p = self.distribution_at(a + k as f64 * h)?;
            total += c * self.weighted_prob_from(&p, theta, eta);
        }
        Ok(total * h / 3.0)
    }

    /// Probability mass on even and odd permutations.
    pub fn parity_masses(&self, p: &[f64]) -> (f64, f64) {
        let even = self.expect(p, |s| self.is_even(s) as u8 as f64);
        let odd = self.expect(p, |s| (!self.is_even(s)) as u8 as f64);
        (even, odd)
    }

    /// Checks that `log Z_θ` is convex on `grid`.
    ///
    /// The reported left side is the smallest second difference
    /// `2[(h₂f₀ + h₁f₂)/(h₁+h₂) − f₁]`, which is `f₀ + f₂ − 2f₁` on a uniform grid.
    /// Convexity is only asserted by theory for integer θ.
    pub fn check_log_convexity(&self, theta: f64, grid: &[f64]) -> Result<BoundReport> {
        check_theta(theta)?;
        if grid.len() < 3 || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(precondition("grid needs at least 3 strictly increasing times"));
        }
        let log_z = grid
            .iter()
            .map(|&t| self.partition(theta, t).map(f64::ln))
            .collect::<Result<Vec<_>>>()?;
        let min_second = (1..grid.len() - 1)
            .map(|k| {
                let (h1, h2) = (grid[k] - grid[k - 1], grid[k + 1] - grid[k]);
                2.0 * ((h2 * log_z[k - 1] + h1 * log_z[k + 1]) / (h1 + h2) - log_z[k])
            })
            .fold(f64::INFINITY, f64::min);
        Ok(BoundReport::new(
            "log_partition_convexity",
            Relation::AtLeast,
            min_second,
            0.0,
            0.0,
            1e-9,
            BoundParams {
                theta: Some(theta),
                a: Some(grid[0]),
                b: Some(grid[grid.len() - 1]),
                n: Some(self.n),
                ..Default::default()
            },
        ))
    }

    /// Evaluates both sides of `d/dt E[N] = E[2|E_=| − |E|]` and
    /// `dZ_θ/dt = ((θ−1)/θ)·E[θ^N((θ+1)|E_=| − |E|)]` with `p′ = pQ`.
    pub fn derivative_identities(&self, theta: f64, t: f64) -> Result<[BoundReport; 2]> {
        check_theta(theta)?;
        let p = self.distribution_at(t)?;
        let dp = self.generator_action(&p);
        let m = self.num_edges() as f64;
        let n_of = |s: usize| self.num_cycles[s] as f64;
        let same = |s: usize| self.same_cycle_edges[s] as f64;
        let w = |s: usize| theta.powi(self.num_cycles[s] as i32);
        let params = BoundParams { theta: Some(theta), t: Some(t), n: Some(self.n), ..Default::default() };

        let lhs_n = self.expect(&dp, n_of);
        let rhs_n = self.expect(&p, |s| 2.0 * same(s) - m);
        let lhs_z = self.expect(&dp, w);
        let rhs_z = (theta - 1.0) / theta * self.expect(&p, |s| w(s) * ((theta + 1.0) * same(s) - m));
        let tol = |x: f64| 1e-9 * x.abs().max(1.0);
        Ok([
            BoundReport::new("mean_cycle_count_derivative", Relation::Equal, lhs_n, rhs_n, 0.0, tol(rhs_n), params),
            BoundReport::new("partition_derivative", Relation::Equal, lhs_z, rhs_z, 0.0, tol(rhs_z), params),
        ])
    }

    /// Exact `Z_θ(t)`, `E[N(X_t)]` and `P_{θ,t}(A_η)` at each time.
    pub fn table(&self, theta: f64, eta: f64, times: &[f64]) -> Result<Vec<ExactRow>> {
        check_theta(theta)?;
        check_eta(eta)?;
        times
            .iter()
            .map(|&t| {
                let p = self.distribution_at(t)?;
                Ok(ExactRow {
                    t,
                    partition: self.expect(&p, |s| theta.powi(self.num_cycles[s] as i32)),
                    mean_cycles: self.expect(&p, |s| self.num_cycles[s] as f64),
                    weighted_prob: self.weighted_prob_from(&p, theta, eta),
                })
            })
            .collect()
    }

    /// Checks every stored transition against an independently computed
    /// `τ_e∘σ` from [`crate::permutation::PermutationState`].
    pub fn verify_transitions(&self, g: &std::sync::Arc<RegularGraph>) -> std::result::Result<(), String> {
        use crate::permutation::PermutationState;
        for s in 0..self.num_states() {
            let base = PermutationState::from_image(g.clone(), self.permutation(s)).map_err(|e| e.to_string())?;
            if base.num_cycles() != self.num_cycles(s) || base.same_cycle_edges() != self.same_cycle_edges(s) {
                return Err(format!("state {s}: functionals disagree"));
            }
            for (e, &target) in self.successors(s).iter().enumerate() {
                let mut next = base.clone();
                next.apply_edge(e);
                if lehmer_rank(next.image()) != target as usize {
                    return Err(format!("state {s}, edge {e}: transition disagrees"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRow {
    pub t: f64,
    pub partition: f64,
    pub mean_cycles: f64,
    pub weighted_prob: f64,
}

pub const EXACT_CSV_HEADER: &str = "theta,eta,t,Z,mean_N,prob_macroscopic";

/// CSV rendering of [`ExactChain::table`].
pub fn exact_table_csv(theta: f64, eta: f64, rows: &[ExactRow]) -> String {
    let mut out = format!("{EXACT_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{theta},{eta},{},{},{},{}", r.t, r.partition, r.mean_cycles, r.weighted_prob);
    }
    out
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(precondition(format!("t = {t} must be finite and non-negative")));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(precondition(format!("theta = {theta} must be positive and finite")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(precondition(format!("eta = {eta} must lie in (0, 1]")));
    }
    Ok(())
}
