//! Replica-parallel Monte Carlo plumbing.

use rayon::prelude::*;

use crate::error::{precondition, Result};
use crate::rng::{self, StreamRng};

/// Replica count and master seed of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub replicas: usize,
    pub seed: u64,
}

impl MonteCarlo {
    pub fn new(replicas: usize, seed: u64) -> Self {
        Self { replicas, seed }
    }

    pub(crate) fn require(&self, min: usize) -> Result<()> {
        if self.replicas < min {
            return Err(precondition(format!("need at least {min} replicas, got {}", self.replicas)));
        }
        Ok(())
    }

    /// Runs `f(index, rng)` for every replica on the current rayon pool.
    ///
    /// Results come back in replica order, so any sequential reduction over
    /// them is independent of the thread count.
    pub fn run<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &mut StreamRng) -> T + Sync + Send,
    {
        (0..self.replicas as u64)
            .into_par_iter()
            .map(|i| f(i, &mut rng::replica(self.seed, i)))
            .collect()
    }
}

/// Sample mean and its standard error.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let r = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / r;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (r - 1.0) / r).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn results_in_replica_order_regardless_of_pool() {
        let mc = MonteCarlo::new(257, 99);
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let f = |i: u64, r: &mut StreamRng| (i, r.random::<u64>());
        let a = serial.install(|| mc.run(f));
        let b = wide.install(|| mc.run(f));
        assert_eq!(a, b);
        assert!(a.iter().enumerate().all(|(i, x)| x.0 == i as u64));
    }

    #[test]
    fn mean_se() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }
}
