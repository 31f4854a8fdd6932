//! Closed-form critical times and lower bounds on macroscopic-cycle
//! probabilities for the interchange process (`θ = 1`) and its θ-weighted
//! variant on d-regular graphs, plus the [`BoundReport`] comparison record.
//!
//! All bounds are pure functions of their parameters. Inputs at `θ = 1`
//! route through the continuous extension `θ log θ / (θ − 1) → 1`.

use std::fmt::Write as _;

use crate::error::{precondition, Result};

/// How a report's two sides are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Inequality `lhs ≥ rhs`.
    AtLeast,
    /// Identity `lhs = rhs`.
    Equal,
}

/// Parameters attached to a report; unset entries are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundParams {
    pub theta: Option<f64>,
    pub d: Option<f64>,
    pub epsilon: Option<f64>,
    pub eta: Option<f64>,
    pub s: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub t: Option<f64>,
    pub n: Option<usize>,
}

impl BoundParams {
    /// `key=value` pairs separated by `;`.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                if !out.is_empty() {
                    out.push(';');
                }
                let _ = write!(out, "{k}={v}");
            }
        };
        push("theta", self.theta);
        push("d", self.d);
        push("epsilon", self.epsilon);
        push("eta", self.eta);
        push("s", self.s);
        push("a", self.a);
        push("b", self.b);
        push("t", self.t);
        push("n", self.n.map(|n| n as f64));
        out
    }
}

/// Comparison of an estimated or exact left side against a right side.
///
/// The verdict passes when `margin = lhs − rhs` is at least
/// `−(3·std_error + tolerance)` for [`Relation::AtLeast`], or at most that
/// much in absolute value for [`Relation::Equal`].
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    /// Standard error of the margin (zero for exact evaluations).
    pub std_error: f64,
    /// Deterministic slack for roundoff or discretization.
    pub tolerance: f64,
    pub margin: f64,
    pub verdict: bool,
    pub params: BoundParams,
}

impl BoundReport {
    pub fn new(
        name: impl Into<String>,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        std_error: f64,
        tolerance: f64,
        params: BoundParams,
    ) -> Self {
        let margin = lhs - rhs;
        let slack = 3.0 * std_error + tolerance;
        let verdict = match relation {
            Relation::AtLeast => margin >= -slack,
            Relation::Equal => margin.abs() <= slack,
        };
        Self { name: name.into(), relation, lhs, rhs, std_error, tolerance, margin, verdict, params }
    }
}

pub const REPORT_CSV_HEADER: &str = "name,relation,lhs,rhs,std_error,tolerance,margin,verdict,params";

/// One CSV row per report.
pub fn reports_csv(reports: &[BoundReport]) -> String {
    let mut out = format!("{REPORT_CSV_HEADER}\n");
    for r in reports {
        let relation = match r.relation {
            Relation::AtLeast => "at_least",
            Relation::Equal => "equal",
        };
        let _ = writeln!(
            out,
            "{},{relation},{},{},{},{},{},{},{}",
            r.name,
            r.lhs,
            r.rhs,
            r.std_error,
            r.tolerance,
            r.margin,
            if r.verdict { "pass" } else { "fail" },
            r.params.describe()
        );
    }
    out
}

/// `θ log θ / (θ − 1)`, continuously extended by 1 at `θ = 1`.
pub fn theta_log_ratio(theta: f64) -> f64 {
    let u = theta - 1.0;
    if u == 0.0 {
        1.0
    } else {
        theta * u.ln_1p() / u
    }
}

fn check_theta_d(theta: f64, d: f64) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(precondition(format!("theta = {theta} must be positive")));
    }
    if !(d > 2.0 * (1.0 + theta)) {
        return Err(precondition(format!("d = {d} must exceed 2(1+θ) = {}", 2.0 * (1.0 + theta))));
    }
    Ok(())
}

fn check_epsilon(d: f64, epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0 && epsilon < (d - 2.0) / 2.0) {
        return Err(precondition(format!("epsilon = {epsilon} must lie in [0, (d−2)/2)")));
    }
    Ok(())
}

/// Critical time `T(θ, d) = 2θ log θ / ((θ−1)(d − 2(1+θ)))`, with `T(1, d) = 2/(d−4)`.
pub fn critical_time(theta: f64, d: f64) -> Result<f64> {
    check_theta_d(theta, d)?;
    Ok(2.0 * theta_log_ratio(theta) / (d - 2.0 * (1.0 + theta)))
}

/// Lower bound on `(1/s)∫_a^{a+s} P_t(A_η) dt` for the interchange process:
/// `(d − 2(2(1+ε) + 1/s)) / (2(d − 2(1+ε)))`.
pub fn stirring_interval_bound(d: f64, epsilon: f64, s: f64) -> Result<f64> {
    check_epsilon(d, epsilon)?;
    if !(s > 0.0) {
        return Err(precondition(format!("s = {s} must be positive")));
    }
    Ok((d - 2.0 * (2.0 * (1.0 + epsilon) + 1.0 / s)) / (2.0 * (d - 2.0 * (1.0 + epsilon))))
}

/// Lower bound on `∫_a^b P_{θ,t}(A_η) dt`:
/// `((b−a)(d/2 − (θ+1)(1+ε)) − T(θ,d)(d/2 − (1+θ))) / ((1+θ)(d/2 − (1+ε)))`.
pub fn theorem2_integral_bound(theta: f64, d: f64, epsilon: f64, a: f64, b: f64) -> Result<f64> {
    check_theta_d(theta, d)?;
    check_epsilon(d, epsilon)?;
    if !(a >= 0.0 && b >= a) {
        return Err(precondition(format!("need 0 ≤ a ≤ b, got a = {a}, b = {b}")));
    }
    let half_d = d / 2.0;
    let t_crit = critical_time(theta, d)?;
    let num = (b - a) * (half_d - (theta + 1.0) * (1.0 + epsilon)) - t_crit * (half_d - (1.0 + theta));
    Ok(num / ((1.0 + theta) * (half_d - (1.0 + epsilon))))
}

/// Pointwise lower bound on `P_{θ,t}(A_η)` for integer `θ ≥ 2`:
/// `(d/2 − (1+θ)(1+ε) − θ log θ/((θ−1)t)) / ((1+θ)(d/2 − 1 − ε))`.
pub fn theorem1_pointwise_bound(theta: u32, d: f64, epsilon: f64, t: f64) -> Result<f64> {
    if theta < 2 {
        return Err(precondition(format!("theta = {theta} must be an integer ≥ 2")));
    }
    let theta = theta as f64;
    check_theta_d(theta, d)?;
    check_epsilon(d, epsilon)?;
    if !(t > 0.0) {
        return Err(precondition(format!("t = {t} must be positive")));
    }
    let half_d = d / 2.0;
    let num = half_d - (1.0 + theta) * (1.0 + epsilon) - theta_log_ratio(theta) / t;
    Ok(num / ((1.0 + theta) * (half_d - 1.0 - epsilon)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_time_values() {
        assert_eq!(critical_time(1.0, 5.0).unwrap(), 2.0);
        assert!((critical_time(2.0, 7.0).unwrap() - 4.0 * 2f64.ln()).abs() < 1e-12);
        assert!((critical_time(1.0, 10.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(critical_time(1.0, 4.0).is_err());
        assert!(critical_time(2.0, 6.0).is_err());
        assert!(critical_time(0.0, 6.0).is_err());
    }

    #[test]
    fn critical_time_is_continuous_at_one() {
        for d in 5..=12 {
            let d = d as f64;
            let at_one = critical_time(1.0, d).unwrap();
            for theta in [1.0 - 1e-6, 1.0 + 1e-6] {
                assert!((critical_time(theta, d).unwrap() - at_one).abs() <= 1e-5);
            }
        }
    }

    #[test]
    fn critical_time_decreases_in_d() {
        for theta in [0.5, 1.0, 2.0, 3.0] {
            let lo = 2.0 * (1.0 + theta);
            let grid: Vec<f64> = (1..=100).map(|k| lo + 0.1 * k as f64).collect();
            for w in grid.windows(2) {
                assert!(critical_time(theta, w[1]).unwrap() < critical_time(theta, w[0]).unwrap());
            }
        }
    }

    #[test]
    fn stirring_bound_values() {
        assert!((stirring_interval_bound(10.0, 0.5, 1.0).unwrap() - 2.0 / 14.0).abs() < 1e-12);
        // s → ∞, ε → 0 limit is (d−4)/(2(d−2)).
        let far = stirring_interval_bound(9.0, 0.0, 1e12).unwrap();
        assert!((far - 5.0 / 14.0).abs() < 1e-10);
        assert!(stirring_interval_bound(4.0, 1.0, 1.0).is_err());
        assert!(stirring_interval_bound(10.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn stirring_window_beyond_critical_time_is_positive() {
        // s = 2/(d−4) + δ with ε small enough gives a positive integral bound.
        for d in [5.0, 6.0, 10.0] {
            for delta in [0.05, 0.5, 2.0] {
                let s = 2.0 / (d - 4.0) + delta;
                let eps = 1e-3 * delta * (d - 4.0) / (2.0 + delta * (d - 4.0));
                assert!(s * stirring_interval_bound(d, eps, s).unwrap() > 0.0);
            }
            // Exactly at the critical window with ε = 0 the bound vanishes.
            let s = 2.0 / (d - 4.0);
            assert!(stirring_interval_bound(d, 0.0, s).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn theorem2_vanishes_at_critical_window() {
        for (theta, d) in [(0.5, 4.0), (1.0, 6.0), (2.0, 7.0), (3.0, 12.0)] {
            let t = critical_time(theta, d).unwrap();
            assert!(theorem2_integral_bound(theta, d, 0.0, 1.0, 1.0 + t).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn theorem2_matches_stirring_bound_at_theta_one() {
        for d in [5.0, 8.0, 10.0] {
            for eps in [0.1, 0.5] {
                for s in [0.5, 1.0, 4.0] {
                    let lhs = theorem2_integral_bound(1.0, d, eps, 2.0, 2.0 + s).unwrap();
                    let rhs = s * stirring_interval_bound(d, eps, s).unwrap();
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn theorem2_two_routes() {
        // θ = 2, d = 8, ε = 0.1, [0, 5]. Second route: T(2,8) = 4 log 2 / 2 and
        // T·(d/2 − 3) = 2 log 2.
        let v = theorem2_integral_bound(2.0, 8.0, 0.1, 0.0, 5.0).unwrap();
        let direct = (5.0 * (4.0 - 3.0 * 1.1) - 2.0 * 2f64.ln()) / (3.0 * (4.0 - 1.1));
        assert!((v - direct).abs() < 1e-12);
        assert!(v > 0.0);
    }

    #[test]
    fn theorem2_proof_epsilon_choice() {
        for (theta, d) in [(0.5, 4.0), (2.0, 7.0), (3.0, 10.0)] {
            let s_d = critical_time(theta, d).unwrap();
            let k = d / 2.0 - (theta + 1.0);
            for delta in [0.01, 0.3, 3.0] {
                assert!(theorem2_integral_bound(theta, d, 0.05, 0.0, s_d).unwrap() <= 0.0);
                let eps = delta / (2.0 * (s_d + delta)) * k / (theta + 1.0);
                let v = theorem2_integral_bound(theta, d, eps, 1.0, 1.0 + s_d + delta).unwrap();
                let closed = k * delta / (2.0 * (1.0 + theta) * (d / 2.0 - (1.0 + eps)));
                assert!(v > 0.0);
                assert!((v - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn theorem1_values() {
        for (theta, d) in [(2u32, 7.0), (3, 9.0), (2, 12.0)] {
            let t = critical_time(theta as f64, d).unwrap();
            assert!(theorem1_pointwise_bound(theta, d, 0.0, t).unwrap().abs() < 1e-12);
            let far = theorem1_pointwise_bound(theta, d, 0.0, 1e15).unwrap();
            let limit = (d / 2.0 - (1.0 + theta as f64)) / ((1.0 + theta as f64) * (d / 2.0 - 1.0));
            assert!((far - limit).abs() < 1e-12);
        }
        // θ = 2, d = 7, t = 2T(2,7), ε = 0.05: θ log θ/((θ−1)t) = 1/4, numerator 3.5 − 3.15 − 0.25.
        let t = 2.0 * critical_time(2.0, 7.0).unwrap();
        let v = theorem1_pointwise_bound(2, 7.0, 0.05, t).unwrap();
        assert!((v - 0.1 / (3.0 * 2.45)).abs() < 1e-12);
        assert!(theorem1_pointwise_bound(1, 7.0, 0.05, 1.0).is_err());
        assert!(theorem1_pointwise_bound(2, 6.0, 0.05, 1.0).is_err());
        assert!(theorem1_pointwise_bound(2, 7.0, 0.05, 0.0).is_err());
    }

    #[test]
    fn theorem1_monotone() {
        let (theta, d) = (2u32, 9.0);
        for w in [0.5f64, 1.0, 2.0, 4.0, 8.0].windows(2) {
            assert!(
                theorem1_pointwise_bound(theta, d, 0.1, w[1]).unwrap()
                    > theorem1_pointwise_bound(theta, d, 0.1, w[0]).unwrap()
            );
        }
        for w in [0.0f64, 0.1, 0.5, 1.0].windows(2) {
            assert!(
                theorem1_pointwise_bound(theta, d, w[1], 3.0).unwrap()
                    < theorem1_pointwise_bound(theta, d, w[0], 3.0).unwrap()
            );
        }
    }

    #[test]
    fn report_verdicts() {
        let p = BoundParams::default();
        assert!(BoundReport::new("x", Relation::AtLeast, 1.0, 1.2, 0.1, 0.0, p).verdict);
        assert!(!BoundReport::new("x", Relation::AtLeast, 1.0, 1.4, 0.1, 0.0, p).verdict);
        assert!(BoundReport::new("x", Relation::Equal, 1.0, 0.8, 0.1, 0.0, p).verdict);
        assert!(!BoundReport::new("x", Relation::Equal, 1.0, 1.4, 0.1, 0.0, p).verdict);
        let q = BoundParams { theta: Some(2.0), n: Some(4), ..Default::default() };
        assert_eq!(q.describe(), "theta=2;n=4");
    }
}
