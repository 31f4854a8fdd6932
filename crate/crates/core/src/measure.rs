//! θ-weighted estimators.
//!
//! Quantities under the weighted law `P_{θ,t}(A) = E[θ^{N(X_t)} 1_A] / Z_θ(t)`
//! are estimated by reweighting independent replicas of the unweighted
//! process with `w = θ^{N}`. Weights are handled in log space and shifted by
//! their maximum before exponentiation. The variance of these estimators
//! grows like `exp(c·n·|log θ|)`; check `ess` before trusting a value.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{precondition, Result};
use crate::graph::RegularGraph;
use crate::process::{derivative_stencil, has_macroscopic_cycle, sample_at_time, simulate_path_with, TrajectoryConfig};
use crate::replica::{mean_and_se, MonteCarlo};
use crate::theory::{BoundParams, BoundReport, Relation};

/// An ESS below this fraction of the replica count flags the estimate.
pub const LOW_ESS_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEstimate {
    pub value: f64,
    pub std_error: f64,
    /// `(Σw)² / Σw²` (minimum over grid points for time integrals).
    pub ess: f64,
    pub replicas: usize,
    pub theta: f64,
    pub t: f64,
    /// `ess < LOW_ESS_FRACTION · replicas`.
    pub low_ess: bool,
}

impl WeightedEstimate {
    fn new(value: f64, std_error: f64, ess: f64, replicas: usize, theta: f64, t: f64) -> Self {
        let low_ess = ess < LOW_ESS_FRACTION * replicas as f64;
        Self { value, std_error, ess, replicas, theta, t, low_ess }
    }
}

/// Header of [`estimates_csv`].
pub const ESTIMATE_CSV_HEADER: &str = "theta,t,quantity,value,std_error,ess,replicas,seed";

/// `theta,t,quantity,value,std_error,ess,replicas,seed` rows.
pub fn estimates_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a WeightedEstimate)>, seed: u64) -> String {
    let mut out = format!("{ESTIMATE_CSV_HEADER}\n");
    for (quantity, e) in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            e.theta, e.t, quantity, e.value, e.std_error, e.ess, e.replicas, seed
        );
    }
    out
}

/// One replica of `X_t`, reduced to the functionals the estimators need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicaSample {
    pub num_cycles: usize,
    pub largest_cycle: usize,
    pub same_cycle_edges: usize,
}

/// Independent draws of `X_t`, one per replica stream.
pub fn sample_replicas(g: &Arc<RegularGraph>, t: f64, mc: &MonteCarlo) -> Result<Vec<ReplicaSample>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(precondition(format!("t = {t} must be finite and non-negative")));
    }
    Ok(mc.run(|_, r| {
        let s = sample_at_time(g, t, r).expect("validated time");
        ReplicaSample {
            num_cycles: s.num_cycles(),
            largest_cycle: s.largest_cycle(),
            same_cycle_edges: s.same_cycle_edges(),
        }
    }))
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

/// Weights `θ^{N_i − N_max}` (for θ ≥ 1; the shift is by the largest log weight in general).
struct LogWeights {
    shift: f64,
    w: Vec<f64>,
}

impl LogWeights {
    fn new(cycle_counts: impl Iterator<Item = usize>, theta: f64) -> Self {
        let log_theta = theta.ln();
        let logs: Vec<f64> = cycle_counts.map(|n| n as f64 * log_theta).collect();
        let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w = logs.iter().map(|l| (l - shift).exp()).collect();
        Self { shift, w }
    }

    fn sum(&self) -> f64 {
        self.w.iter().sum()
    }

    fn ess(&self) -> f64 {
        let s = self.sum();
        s * s / self.w.iter().map(|w| w * w).sum::<f64>()
    }
}

/// `log Ẑ_θ(t)` from samples drawn at time `t`, with delta-method error.
pub fn log_partition_from(samples: &[ReplicaSample], theta: f64, t: f64) -> Result<WeightedEstimate> {
    check_theta(theta)?;
    if samples.len() < 2 {
        return Err(precondition("need at least 2 replicas"));
    }
    let lw = LogWeights::new(samples.iter().map(|s| s.num_cycles), theta);
    let r = samples.len() as f64;
    let mean = lw.sum() / r;
    let var = lw.w.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / (r - 1.0);
    let value = lw.shift + mean.ln();
    Ok(WeightedEstimate::new(value, (var / r).sqrt() / mean, lw.ess(), samples.len(), theta, t))
}

/// Ratio estimate of `E_{θ,t}[f]` with delta-method standard error
/// `sqrt(Σ w²(f − r)²) / Σw`.
fn weighted_ratio(samples: &[ReplicaSample], theta: f64, t: f64, f: impl Fn(&ReplicaSample) -> f64) -> WeightedEstimate {
    let lw = LogWeights::new(samples.iter().map(|s| s.num_cycles), theta);
    let total = lw.sum();
    let weighted: f64 = lw.w.iter().zip(samples).map(|(w, s)| w * f(s)).sum();
    let ratio = weighted / total;
    let spread: f64 = lw
        .w
        .iter()
        .zip(samples)
        .map(|(w, s)| {
            let dev = f(s) - ratio;
            w * w * dev * dev
        })
        .sum();
    WeightedEstimate::new(ratio, spread.sqrt() / total, lw.ess(), samples.len(), theta, t)
}

/// `P̂_{θ,t}(A_η)` from samples drawn at time `t` on an `n`-vertex graph.
pub fn weighted_prob_from(samples: &[ReplicaSample], n: usize, theta: f64, t: f64, eta: f64) -> Result<WeightedEstimate> {
    check_theta(theta)?;
    check_eta(eta)?;
    if samples.len() < 2 {
        return Err(precondition("need at least 2 replicas"));
    }
    Ok(weighted_ratio(samples, theta, t, |s| has_macroscopic_cycle(s.largest_cycle, n, eta) as u8 as f64))
}

/// `Ê_{θ,t}[N]` from samples drawn at time `t`.
pub fn weighted_mean_cycles_from(samples: &[ReplicaSample], theta: f64, t: f64) -> Result<WeightedEstimate> {
    check_theta(theta)?;
    if samples.len() < 2 {
        return Err(precondition("need at least 2 replicas"));
    }
    Ok(weighted_ratio(samples, theta, t, |s| s.num_cycles as f64))
}

/// Plain Monte Carlo frequency of `A_η` with standard error `sqrt(Σ(1_A − p)²)/R`.
pub fn prob_from(samples: &[ReplicaSample], n: usize, t: f64, eta: f64) -> Result<WeightedEstimate> {
    check_eta(eta)?;
    if samples.len() < 2 {
        return Err(precondition("need at least 2 replicas"));
    }
    let r = samples.len() as f64;
    let hits: Vec<f64> = samples
        .iter()
        .map(|s| has_macroscopic_cycle(s.largest_cycle, n, eta) as u8 as f64)
        .collect();
    let p = hits.iter().sum::<f64>() / r;
    let spread: f64 = hits.iter().map(|y| (y - p) * (y - p)).sum();
    Ok(WeightedEstimate::new(p, spread.sqrt() / r, r, samples.len(), 1.0, t))
}

/// Unweighted `E[N(X_t)]` from samples.
pub fn mean_cycles_from(samples: &[ReplicaSample], t: f64) -> WeightedEstimate {
    let xs: Vec<f64> = samples.iter().map(|s| s.num_cycles as f64).collect();
    let (mean, se) = mean_and_se(&xs);
    WeightedEstimate::new(mean, se, samples.len() as f64, samples.len(), 1.0, t)
}

/// Estimates `log Z_θ(t) = log E[θ^{N(X_t)}]`.
pub fn estimate_log_partition(g: &Arc<RegularGraph>, theta: f64, t: f64, mc: &MonteCarlo) -> Result<WeightedEstimate> {
    check_theta(theta)?;
    mc.require(2)?;
    log_partition_from(&sample_replicas(g, t, mc)?, theta, t)
}

/// Estimates `P_{θ,t}(A_η)`.
pub fn estimate_weighted_prob(
    g: &Arc<RegularGraph>,
    theta: f64,
    t: f64,
    eta: f64,
    mc: &MonteCarlo,
) -> Result<WeightedEstimate> {
    check_theta(theta)?;
    check_eta(eta)?;
    mc.require(2)?;
    weighted_prob_from(&sample_replicas(g, t, mc)?, g.n(), theta, t, eta)
}

/// Unweighted `P_t(A_η)`.
pub fn estimate_prob(g: &Arc<RegularGraph>, t: f64, eta: f64, mc: &MonteCarlo) -> Result<WeightedEstimate> {
    check_eta(eta)?;
    mc.require(2)?;
    prob_from(&sample_replicas(g, t, mc)?, g.n(), t, eta)
}

/// Time-integral estimate with a coarser-grid comparison value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeIntegralEstimate {
    /// `t` holds the interval length `b − a`.
    pub estimate: WeightedEstimate,
    /// Trapezoid rule on every other grid point, when the grid allows it.
    pub coarse_value: Option<f64>,
    /// True when occupation times were integrated exactly (θ = 1).
    pub exact_in_time: bool,
}

/// Unweighted `∫_a^b P_t(A_η) dt` from exact per-path occupation times.
pub fn estimate_time_integral(g: &Arc<RegularGraph>, a: f64, b: f64, eta: f64, mc: &MonteCarlo) -> Result<TimeIntegralEstimate> {
    check_eta(eta)?;
    check_interval(a, b)?;
    mc.require(2)?;
    let cfg = TrajectoryConfig { t_end: b, snapshot_times: Vec::new(), seed: mc.seed, record_events: false, occupation_from: a };
    let occ = mc.run(|_, r| simulate_path_with(g, &cfg, &[eta], r).expect("validated config").occupation[0]);
    let (mean, se) = mean_and_se(&occ);
    Ok(TimeIntegralEstimate {
        estimate: WeightedEstimate::new(mean, se, mc.replicas as f64, mc.replicas, 1.0, b - a),
        coarse_value: None,
        exact_in_time: true,
    })
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && a < b && b.is_finite()) {
        return Err(precondition(format!("need 0 ≤ a < b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Estimates `∫_a^b P_{θ,t}(A_η) dt`.
///
/// For θ = 1 this is [`estimate_time_integral`]. Otherwise each replica runs
/// one path through a uniform grid of `grid_points` times, every grid time is
/// reweighted by `θ^{N}` at that time, and the ratio estimates are combined by
/// the trapezoid rule. The standard error linearizes every ratio and sums the
/// per-replica influence across grid points, so correlations along a path
/// are accounted for.
pub fn estimate_weighted_time_integral(
    g: &Arc<RegularGraph>,
    theta: f64,
    a: f64,
    b: f64,
    eta: f64,
    grid_points: usize,
    mc: &MonteCarlo,
) -> Result<TimeIntegralEstimate> {
    check_theta(theta)?;
    check_eta(eta)?;
    check_interval(a, b)?;
    mc.require(2)?;
    if theta == 1.0 {
        return estimate_time_integral(g, a, b, eta, mc);
    }
    if grid_points < 2 {
        return Err(precondition("need at least 2 grid points"));
    }
    let step = (b - a) / (grid_points - 1) as f64;
    let last = (grid_points - 1) as f64;
    let grid: Vec<f64> = (0..grid_points).map(|k| a + (b - a) * k as f64 / last).collect();
    let cfg = TrajectoryConfig::new(b, grid.clone(), mc.seed)?;
    let n = g.n();
    let paths = mc.run(|_, r| {
        simulate_path_with(g, &cfg, &[], r)
            .expect("validated config")
            .snapshots
            .iter()
            .map(|s| (s.num_cycles, has_macroscopic_cycle(s.largest_cycle, n, eta) as u8 as f64))
            .collect::<Vec<_>>()
    });

    let trapezoid = |k: usize, count: usize, h: f64| if k == 0 || k + 1 == count { h / 2.0 } else { h };
    let mut values = Vec::with_capacity(grid_points);
    let mut influence = vec![0.0; mc.replicas];
    let mut min_ess = f64::INFINITY;
    for k in 0..grid_points {
        let lw = LogWeights::new(paths.iter().map(|p| p[k].0), theta);
        let total = lw.sum();
        let ratio = lw.w.iter().zip(&paths).map(|(w, p)| w * p[k].1).sum::<f64>() / total;
        let c = trapezoid(k, grid_points, step);
        for ((psi, w), p) in influence.iter_mut().zip(&lw.w).zip(&paths) {
            *psi += c * w * (p[k].1 - ratio) / total;
        }
        min_ess = min_ess.min(lw.ess());
        values.push(ratio);
    }
    let value: f64 = values.iter().enumerate().map(|(k, r)| trapezoid(k, grid_points, step) * r).sum();
    let se = influence.iter().map(|x| x * x).sum::<f64>().sqrt();
    let coarse_value = ((grid_points - 1) % 2 == 0 && grid_points >= 3).then(|| {
        let coarse = (grid_points + 1) / 2;
        (0..coarse).map(|j| trapezoid(j, coarse, 2.0 * step) * values[2 * j]).sum()
    });
    Ok(TimeIntegralEstimate {
        estimate: WeightedEstimate::new(value, se, min_ess, mc.replicas, theta, b - a),
        coarse_value,
        exact_in_time: false,
    })
}

/// Checks `dZ_θ/dt = ((θ−1)/θ)·E[θ^{N}((θ+1)|E_=| − |E|)]`.
///
/// Both sides are reported in units of `Z` (not `log Z`). The left side is a
/// finite difference of `Ẑ` along shared paths; the standard error is that of
/// the per-replica difference.
pub fn quantum_derivative_check(g: &Arc<RegularGraph>, theta: f64, t: f64, mc: &MonteCarlo) -> Result<BoundReport> {
    check_theta(theta)?;
    if theta == 1.0 {
        return Err(precondition("theta must differ from 1"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(precondition(format!("t = {t} must be finite and non-negative")));
    }
    mc.require(2)?;
    let (_, nodes, coeffs) = derivative_stencil(t);
    let at = if t > 0.0 { 1 } else { 0 };
    let cfg = TrajectoryConfig::new(nodes[2], nodes.to_vec(), mc.seed)?;
    let paths = mc.run(|_, r| simulate_path_with(g, &cfg, &[], r).expect("validated config").snapshots);

    let log_theta = theta.ln();
    let shift = paths
        .iter()
        .flat_map(|p| p.iter().map(|s| s.num_cycles as f64 * log_theta))
        .fold(f64::NEG_INFINITY, f64::max);
    let m = g.num_edges() as f64;
    let factor = (theta - 1.0) / theta;
    let mut lhs = Vec::with_capacity(paths.len());
    let mut rhs = Vec::with_capacity(paths.len());
    let mut diff = Vec::with_capacity(paths.len());
    for p in &paths {
        let w = |k: usize| (p[k].num_cycles as f64 * log_theta - shift).exp();
        let l: f64 = (0..3).map(|k| coeffs[k] * w(k)).sum();
        let r = factor * w(at) * ((theta + 1.0) * p[at].same_cycle_edges as f64 - m);
        lhs.push(l);
        rhs.push(r);
        diff.push(l - r);
    }
    let scale = shift.exp();
    let (_, se) = mean_and_se(&diff);
    Ok(BoundReport::new(
        "quantum_partition_derivative",
        Relation::Equal,
        mean_and_se(&lhs).0 * scale,
        mean_and_se(&rhs).0 * scale,
        se * scale,
        0.0,
        BoundParams { theta: Some(theta), t: Some(t), n: Some(g.n()), d: Some(g.d() as f64), ..Default::default() },
    ))
}
