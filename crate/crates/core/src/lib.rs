//! Hyperelastic material model discovery by fingerprint lookup.
//!
//! An offline phase simulates standardized experiments for a zoo of
//! strain-energy families and stores the normalized responses. The online
//! phase normalizes a measured response, finds the stored fingerprint with
//! the largest inner product and rescales its homogeneity parameters.

pub mod benchmark;
pub mod csvio;
pub mod database;
pub mod error;
pub mod fem;
pub mod grid;
pub mod matcher;
pub mod metrics;
pub mod model;
pub mod noise;
pub mod quadrature;
pub mod supervised;
pub mod unsupervised;

pub use database::{Database, ExperimentKind, Protocol, Record};
pub use error::{Error, Result};
pub use matcher::{match_fingerprint, MatchOptions, MatchResult};
pub use model::{DeformationGradient, Family, Invariants, MaterialModel, Regime};

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
