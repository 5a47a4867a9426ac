//! Exact analysis of Poisson representability for tree-indexed Markov chains.

pub mod calculus;
pub mod cli;
pub mod chain;
pub mod error;
pub mod jet;
pub mod lattice;
pub mod measure;
pub mod montecarlo;
pub mod rational;
pub mod representability;
pub mod thresholds;
pub mod tree;

pub use error::{Error, Result};
