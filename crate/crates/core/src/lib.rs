//! Angular synchronization: estimating `n` unknown angles from noisy pairwise
//! offsets `theta_i - theta_j mod 2pi`, some fraction of which are arbitrary
//! outliers.
//!
//! The main estimator builds the Hermitian matrix of measured phasors and
//! rounds its top eigenvector ([`eig`]). Least squares and a low-rank
//! semidefinite relaxation are available for comparison ([`baselines`]), along
//! with seeded instance generators ([`generators`]), closed-form predictions
//! from random matrix and information theory ([`theory`]) and dense spectra for
//! moderate sizes ([`spectra`]).

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod baselines;
pub mod eig;
mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod spectra;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{AngleEstimate, Edge, GroundTruth, Method, OffsetGraph};
pub use metrics::CorrelationReport;
