use std::sync::Arc;

use interchange::measure::{estimate_weighted_prob, estimate_weighted_time_integral, quantum_derivative_check};
use interchange::oracle::{ExactChain, DEFAULT_STATE_GUARD};
use interchange::{MonteCarlo, RegularGraph};

fn k4() -> (Arc<RegularGraph>, ExactChain) {
    let g = Arc::new(RegularGraph::complete(4).unwrap());
    let chain = ExactChain::build(&g, DEFAULT_STATE_GUARD).unwrap();
    (g, chain)
}

#[test]
fn quantum_derivative_on_k4() {
    let (g, _) = k4();
    let rep = quantum_derivative_check(&g, 2.0, 0.5, &MonteCarlo::new(20_000, 41)).unwrap();
    assert!(rep.verdict, "{rep:?}");
}

#[test]
fn weighted_prob_matches_chain() {
    let (g, chain) = k4();
    for (theta, t) in [(0.5, 0.4), (2.0, 0.4), (3.0, 1.5)] {
        let est = estimate_weighted_prob(&g, theta, t, 0.6, &MonteCarlo::new(20_000, 42)).unwrap();
        let exact = chain.weighted_prob(theta, t, 0.6).unwrap();
        assert!((est.value - exact).abs() <= 4.0 * est.std_error + 1e-12, "θ={theta} t={t}: {} vs {exact}", est.value);
    }
}

#[test]
fn weighted_integral_matches_chain() {
    let (g, chain) = k4();
    for theta in [1.0, 2.0] {
        let est = estimate_weighted_time_integral(&g, theta, 0.0, 2.0, 0.6, 65, &MonteCarlo::new(5_000, 43)).unwrap();
        let exact = chain.weighted_time_integral(theta, 0.0, 2.0, 0.6, 200).unwrap();
        // the grid discretization adds bias on top of sampling noise
        let slack = if est.exact_in_time { 0.0 } else { 5e-3 };
        assert!(
            (est.estimate.value - exact).abs() <= 4.0 * est.estimate.std_error + slack,
            "θ={theta}: {} ± {} vs {exact}",
            est.estimate.value,
            est.estimate.std_error
        );
    }
}

#[test]
fn estimates_reproduce_with_seed() {
    let (g, _) = k4();
    let a = estimate_weighted_prob(&g, 2.0, 0.7, 0.5, &MonteCarlo::new(500, 7)).unwrap();
    let b = estimate_weighted_prob(&g, 2.0, 0.7, 0.5, &MonteCarlo::new(500, 7)).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}
