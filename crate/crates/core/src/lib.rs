//! Statistically validated networks.
//!
//! Backbone extraction for weighted networks (disparity filter), hypergeometric
//! validation of bipartite projections, multiple-test corrections, Louvain
//! community detection, partition comparison metrics, and a rewiring-noise
//! robustness experiment.

pub mod benchmark;
pub mod cli;
pub mod community;
pub mod corrections;
pub mod disparity;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod manifest;
pub mod pvalue;
pub mod svn;

pub use error::{Error, Result};
