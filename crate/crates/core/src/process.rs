//! The continuous-time interchange process on a regular graph.
//!
//! Every edge carries an independent rate-1 Poisson clock; when it rings the
//! edge's transposition is composed on the left of the current permutation.
//! The process starts from the identity. The state *at* time `t` includes
//! every event at times `≤ t`.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};

use crate::error::{precondition, Result};
use crate::graph::RegularGraph;
use crate::permutation::{DeltaRecord, PermutationState};
use crate::replica::{mean_and_se, MonteCarlo};
use crate::rng;
use crate::theory::{BoundParams, BoundReport, Relation};

/// `A_η`: some cycle has more than `η·n` vertices.
pub fn has_macroscopic_cycle(largest_cycle: usize, n: usize, eta: f64) -> bool {
    largest_cycle as f64 > eta * n as f64
}

/// Draws `X_t` directly: `K ~ Poisson(|E|·t)` uniformly random edge
/// transpositions applied to the identity.
pub fn sample_at_time<R: Rng + ?Sized>(
    g: &Arc<RegularGraph>,
    t: f64,
    rng: &mut R,
) -> Result<PermutationState> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(precondition(format!("t = {t} must be finite and non-negative")));
    }
    let mut state = PermutationState::identity(g.clone());
    let mean = g.num_edges() as f64 * t;
    if mean > 0.0 {
        let k = Poisson::new(mean).expect("positive finite mean").sample(rng) as u64;
        for _ in 0..k {
            state.apply_edge(rng.random_range(0..g.num_edges()));
        }
    }
    Ok(state)
}

#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    pub t_end: f64,
    /// Sorted times in `[0, t_end]`.
    pub snapshot_times: Vec<f64>,
    pub seed: u64,
    /// Keep every transposition with its time.
    pub record_events: bool,
    /// Occupation times are accumulated over `[occupation_from, t_end]`.
    pub occupation_from: f64,
}

impl TrajectoryConfig {
    pub fn new(t_end: f64, snapshot_times: Vec<f64>, seed: u64) -> Result<Self> {
        let cfg = Self { t_end, snapshot_times, seed, record_events: false, occupation_from: 0.0 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(precondition(format!("t_end = {} must be finite and non-negative", self.t_end)));
        }
        if self.snapshot_times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(precondition("snapshot times must be sorted"));
        }
        if self.snapshot_times.iter().any(|&s| !(0.0..=self.t_end).contains(&s)) {
            return Err(precondition("snapshot times must lie in [0, t_end]"));
        }
        if !(0.0..=self.t_end).contains(&self.occupation_from) {
            return Err(precondition("occupation window must start inside [0, t_end]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub num_cycles: usize,
    pub same_cycle_edges: usize,
    pub largest_cycle: usize,
    pub largest_cycle_fraction: f64,
    /// Events at times `≤ t`.
    pub events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub t: f64,
    pub delta: DeltaRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub snapshots: Vec<Snapshot>,
    pub etas: Vec<f64>,
    /// Time spent in `A_η` during the occupation window, one entry per η.
    pub occupation: Vec<f64>,
    pub window: (f64, f64),
    pub total_events: u64,
    /// Empty unless `record_events` was set.
    pub events: Vec<EventRecord>,
}

impl TrajectoryRecord {
    /// `t,N,E_eq,max_cycle_frac,events`
    pub fn snapshots_csv(&self) -> String {
        let mut out = String::from("t,N,E_eq,max_cycle_frac,events\n");
        for s in &self.snapshots {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.t, s.num_cycles, s.same_cycle_edges, s.largest_cycle_fraction, s.events
            );
        }
        out
    }

    /// `eta,occupation_time`
    pub fn occupation_csv(&self) -> String {
        let mut out = String::from("eta,occupation_time\n");
        for (eta, occ) in self.etas.iter().zip(&self.occupation) {
            let _ = writeln!(out, "{eta},{occ}");
        }
        out
    }
}

/// Simulates one path on `[0, cfg.t_end]` from the stream selected by `cfg.seed`.
pub fn simulate_path(g: &Arc<RegularGraph>, cfg: &TrajectoryConfig, etas: &[f64]) -> Result<TrajectoryRecord> {
    simulate_path_with(g, cfg, etas, &mut rng::stream(cfg.seed, 0))
}

/// Simulates one path with event-by-event exponential clocks of total rate `|E|`.
pub fn simulate_path_with<R: Rng + ?Sized>(
    g: &Arc<RegularGraph>,
    cfg: &TrajectoryConfig,
    etas: &[f64],
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let n = g.n();
    let m = g.num_edges();
    let clock = Exp::new(m as f64).expect("positive rate");
    let mut state = PermutationState::identity(g.clone());
    let mut snapshots = Vec::with_capacity(cfg.snapshot_times.len());
    let mut occupation = vec![0.0; etas.len()];
    let mut events = Vec::new();
    let mut total_events = 0u64;
    let mut t = 0.0;
    let mut next_snapshot = 0;

    loop {
        let t_next = t + clock.sample(rng);
        while next_snapshot < cfg.snapshot_times.len() && cfg.snapshot_times[next_snapshot] < t_next {
            snapshots.push(Snapshot {
                t: cfg.snapshot_times[next_snapshot],
                num_cycles: state.num_cycles(),
                same_cycle_edges: state.same_cycle_edges(),
                largest_cycle: state.largest_cycle(),
                largest_cycle_fraction: state.largest_cycle_fraction(),
                events: total_events,
            });
            next_snapshot += 1;
        }
        let seg_end = t_next.min(cfg.t_end);
        let seg = seg_end - t.max(cfg.occupation_from);
        if seg > 0.0 {
            for (occ, &eta) in occupation.iter_mut().zip(etas) {
                if has_macroscopic_cycle(state.largest_cycle(), n, eta) {
                    *occ += seg;
                }
            }
        }
        if t_next > cfg.t_end {
            break;
        }
        let delta = state.apply_edge(rng.random_range(0..m));
        total_events += 1;
        if cfg.record_events {
            events.push(EventRecord { t: t_next, delta });
        }
        t = t_next;
    }

    Ok(TrajectoryRecord {
        snapshots,
        etas: etas.to_vec(),
        occupation,
        window: (cfg.occupation_from, cfg.t_end),
        total_events,
        events,
    })
}

/// Finite-difference nodes for a derivative at `t`: central with
/// `h = min(0.05, t/2)` when `t > 0`, second-order forward with `h = 0.05` at `t = 0`.
pub(crate) fn derivative_stencil(t: f64) -> (f64, [f64; 3], [f64; 3]) {
    if t > 0.0 {
        let h = (0.05f64).min(t / 2.0);
        (h, [t - h, t, t + h], [-1.0 / (2.0 * h), 0.0, 1.0 / (2.0 * h)])
    } else {
        let h = 0.05;
        (h, [0.0, h, 2.0 * h], [-3.0 / (2.0 * h), 4.0 / (2.0 * h), -1.0 / (2.0 * h)])
    }
}

/// Checks `d/dt E[N(X_t)] = E[2|E_=| − |E|]`.
///
/// The left side is a finite difference of `E[N]` over nodes sharing one
/// event stream per replica; the right side is sampled at `t` on the same
/// paths. `std_error` is the standard error of the per-replica difference.
pub fn mean_cycle_count_derivative_check(
    g: &Arc<RegularGraph>,
    t: f64,
    mc: &MonteCarlo,
) -> Result<BoundReport> {
    mc.require(2)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(precondition(format!("t = {t} must be finite and non-negative")));
    }
    let (_, nodes, coeffs) = derivative_stencil(t);
    let at = if t > 0.0 { 1 } else { 0 };
    let m = g.num_edges() as f64;
    let cfg = TrajectoryConfig::new(nodes[2], nodes.to_vec(), mc.seed)?;
    let rows = mc.run(|_, r| {
        let rec = simulate_path_with(g, &cfg, &[], r).expect("validated config");
        let fd: f64 = coeffs.iter().zip(&rec.snapshots).map(|(c, s)| c * s.num_cycles as f64).sum();
        let rhs = 2.0 * rec.snapshots[at].same_cycle_edges as f64 - m;
        (fd, rhs)
    });
    let lhs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let diff: Vec<f64> = rows.iter().map(|r| r.0 - r.1).collect();
    let (_, se) = mean_and_se(&diff);
    Ok(BoundReport::new(
        "mean_cycle_count_derivative",
        Relation::Equal,
        mean_and_se(&lhs).0,
        mean_and_se(&rhs).0,
        se,
        0.0,
        BoundParams { t: Some(t), n: Some(g.n()), d: Some(g.d() as f64), ..Default::default() },
    ))
}

/// Across-replica summary at one time of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub mean_cycles: (f64, f64),
    pub mean_same_cycle_edges: (f64, f64),
    pub mean_largest_fraction: (f64, f64),
    /// `P(A_η)` with standard error, one per η.
    pub prob_macroscopic: Vec<(f64, f64)>,
    pub mean_events: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub etas: Vec<f64>,
    pub rows: Vec<SweepRow>,
    /// Mean occupation time of `A_η` over `[window.0, window.1]` with standard error.
    pub occupation: Vec<(f64, f64)>,
    pub window: (f64, f64),
    pub replicas: usize,
}

/// Runs one path per replica over `[0, max(times)]` and summarises the
/// snapshots and occupation times (occupation over `[occupation_from, max(times)]`).
pub fn sweep(
    g: &Arc<RegularGraph>,
    times: &[f64],
    etas: &[f64],
    occupation_from: f64,
    mc: &MonteCarlo,
) -> Result<SweepResult> {
    mc.require(2)?;
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let cfg = TrajectoryConfig {
        t_end,
        snapshot_times: times.to_vec(),
        seed: mc.seed,
        record_events: false,
        occupation_from,
    };
    cfg.validate()?;
    let n = g.n();
    let records = mc.run(|_, r| simulate_path_with(g, &cfg, etas, r).expect("validated config"));
    let column = |f: &dyn Fn(&TrajectoryRecord) -> f64| -> (f64, f64) {
        mean_and_se(&records.iter().map(f).collect::<Vec<_>>())
    };
    let rows = times
        .iter()
        .enumerate()
        .map(|(k, &t)| SweepRow {
            t,
            mean_cycles: column(&|r| r.snapshots[k].num_cycles as f64),
            mean_same_cycle_edges: column(&|r| r.snapshots[k].same_cycle_edges as f64),
            mean_largest_fraction: column(&|r| r.snapshots[k].largest_cycle_fraction),
            prob_macroscopic: etas
                .iter()
                .map(|&eta| {
                    column(&|r| {
                        has_macroscopic_cycle(r.snapshots[k].largest_cycle, n, eta) as u8 as f64
                    })
                })
                .collect(),
            mean_events: column(&|r| r.snapshots[k].events as f64),
        })
        .collect();
    let occupation = (0..etas.len()).map(|j| column(&|r| r.occupation[j])).collect();
    Ok(SweepResult {
        etas: etas.to_vec(),
        rows,
        occupation,
        window: (occupation_from, t_end),
        replicas: mc.replicas,
    })
}
