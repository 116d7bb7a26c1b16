//! Deterministic discrete-time simulator for satellite-serviced
//! quantum-network backbones.
//!
//! The pipeline is: propagate a multi-shell LEO constellation over a fixed
//! epoch grid, build an anisotropic ground-station lattice, score every
//! satellite-station downlink with a Gaussian-beam optical budget, induce
//! per-satellite service topologies (bipartite or multipartite), fold the
//! per-epoch entanglement graphs into connectivity and link-strength
//! metrics, and summarize waiting times with autocorrelation-corrected
//! statistics. Everything is a pure function of the scenario description;
//! there is no randomness anywhere in the pipeline.

// validation uses negated comparisons (`!(x > 0.0)`) so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connectivity;
pub mod constants;
pub mod error;
pub mod groundgrid;
pub mod harness;
pub mod linkmodel;
pub mod orbital;
pub mod service;
pub mod stats;

mod vec3;

pub use error::{Error, Result};
