//! Simulation and exact analysis of the interchange process on random
//! regular graphs, its θ-weighted (quantum Heisenberg) variant, and the
//! critical-time bounds for macroscopic cycles.

pub mod cli;
pub mod error;
pub mod graph;
pub mod measure;
pub mod oracle;
pub mod permutation;
pub mod process;
pub mod replica;
pub mod rng;
pub mod theory;

pub use error::{Error, ErrorCategory, Result};
pub use graph::RegularGraph;
pub use permutation::PermutationState;
pub use replica::MonteCarlo;
