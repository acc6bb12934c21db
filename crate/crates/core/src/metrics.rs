//! Scores for an estimate, against the planted angles or against the
//! measurements alone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{circdist, phasor};
use crate::error::{invalid, Result};
use crate::graph::{AngleEstimate, OffsetGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rho1: f64,
    pub rho2: f64,
    pub sce: usize,
    pub sce_f: f64,
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(invalid(format!("length mismatch: {a} vs {b}")));
    }
    if a == 0 {
        return Err(invalid("empty angle vector"));
    }
    Ok(())
}

/// Modulus of the mean phasor of `theta_hat - theta_true`.
pub fn rho1(theta_hat: &[f64], theta_true: &[f64]) -> Result<f64> {
    check_len(theta_hat.len(), theta_true.len())?;
    let sum: Complex64 = theta_hat
        .iter()
        .zip(theta_true)
        .map(|(&h, &t)| phasor(h - t))
        .sum();
    Ok(sum.norm() / theta_hat.len() as f64)
}

/// `|<z, v>|` with `z_k = exp(i theta_k) / sqrt(n)`. `v` must have unit norm.
pub fn rho2(eigvec: &[Complex64], theta_true: &[f64]) -> Result<f64> {
    check_len(eigvec.len(), theta_true.len())?;
    let norm = eigvec.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(invalid(format!("vector norm {norm} is not 1")));
    }
    let inner: Complex64 = eigvec
        .iter()
        .zip(theta_true)
        .map(|(&v, &t)| phasor(-t) * v)
        .sum();
    Ok(inner.norm() / (theta_true.len() as f64).sqrt())
}

fn check_assignment(theta: &[f64], graph: &OffsetGraph) -> Result<()> {
    if theta.len() != graph.n() {
        return Err(invalid(format!(
            "{} angles for a graph on {} vertices",
            theta.len(),
            graph.n()
        )));
    }
    Ok(())
}

/// Number of edges whose offset disagrees with `theta_i - theta_j` by more
/// than `tol` radians.
pub fn sce(theta: &[f64], graph: &OffsetGraph, tol: f64) -> Result<usize> {
    check_assignment(theta, graph)?;
    if !(tol >= 0.0) {
        return Err(invalid(format!("tolerance {tol} must be >= 0")));
    }
    Ok(graph
        .edges()
        .iter()
        .filter(|e| circdist(theta[e.i] - theta[e.j], e.delta) > tol)
        .count())
}

/// Clamped quadratic penalty: `min(1, (circdist(x, 0) / theta0)^2)`.
pub fn penalty(x: f64, theta0: f64) -> f64 {
    let r = circdist(x, 0.0) / theta0;
    (r * r).min(1.0)
}

/// Sum of [`penalty`] over all edge residuals.
pub fn sce_f(theta: &[f64], graph: &OffsetGraph, theta0: f64) -> Result<f64> {
    check_assignment(theta, graph)?;
    if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
        return Err(invalid(format!("theta0 = {theta0} must lie in (0, pi)")));
    }
    Ok(graph
        .edges()
        .iter()
        .map(|e| penalty(theta[e.i] - theta[e.j] - e.delta, theta0))
        .sum())
}

/// Default penalty width for [`sce_f`]: one cell of an `L`-way discretization.
pub fn default_theta0(levels: usize) -> f64 {
    std::f64::consts::TAU / levels as f64
}

/// Builds the full report for an estimate against planted angles.
pub fn correlation_report(
    estimate: &AngleEstimate,
    theta_true: &[f64],
    graph: &OffsetGraph,
    tol: f64,
    theta0: f64,
) -> Result<CorrelationReport> {
    Ok(CorrelationReport {
        rho1: rho1(&estimate.theta_hat, theta_true)?,
        rho2: rho2(&estimate.eigvec, theta_true)?,
        sce: sce(&estimate.theta_hat, graph, tol)?,
        sce_f: sce_f(&estimate.theta_hat, graph, theta0)?,
    })
}
