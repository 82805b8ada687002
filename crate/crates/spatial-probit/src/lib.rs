//! Bayesian hierarchical voxel-wise binary classification over multi-image
//! spatial data.
//!
//! A latent probit field with subject-specific random intercepts is combined
//! with one of three scalable spatial priors — nearest-neighbor Gaussian
//! process, knot-based reduced-rank approximation, or a proper CAR model —
//! plus a dense GP reference for reduced-size problems. The crate ships the
//! full Metropolis-within-Gibbs sampler, a simulation-study generator, and
//! an ROC-based evaluation harness with a CLI front end.

pub mod bessel;
pub mod car;
pub mod config;
pub mod covariance;
pub mod data;
pub mod error;
pub mod fullgp;
pub mod maps;
pub mod metrics;
pub mod nngp;
pub mod predict;
pub mod reduced_rank;
pub mod rng;
pub mod sampler;
pub mod simulate;
pub mod stats;
pub mod validate;

pub use error::{Error, Result};
