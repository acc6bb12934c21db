//! Seeded synthetic instances: the complete-graph outlier model, the
//! small-world model on the sphere, and noisy clocks on the real line.
//!
//! All generators are pure functions of their parameters. Randomness comes from
//! per-purpose streams (see [`crate::rng`]).

use std::collections::HashSet;
use std::f64::consts::TAU;

use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::angle::wrap;
use crate::error::{invalid, Result};
use crate::graph::{GroundTruth, OffsetGraph};
use crate::rng::{stream, Stream};

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("{name} = {p} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("n = {n} must be at least 2")));
    }
    Ok(())
}

fn uniform_angles(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, Stream::Angles);
    (0..n).map(|_| wrap(rng.random::<f64>() * TAU)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompleteModelParams {
    pub n: usize,
    /// Probability that an edge is good.
    pub p: f64,
    pub seed: u64,
}

impl CompleteModelParams {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        check_probability("p", self.p)
    }
}

/// Complete graph on `n` vertices; every edge is independently good with
/// probability `p` and otherwise carries a uniform offset.
pub fn gen_complete(params: &CompleteModelParams) -> Result<(OffsetGraph, GroundTruth)> {
    params.validate()?;
    let n = params.n;
    let theta = uniform_angles(n, params.seed);
    let mut labels = stream(params.seed, Stream::Labels);
    let mut offsets = stream(params.seed, Stream::Offsets);

    let m = n * (n - 1) / 2;
    let mut triples = Vec::with_capacity(m);
    let mut good_mask = Vec::with_capacity(m);
    for i in 0..n {
        for j in i + 1..n {
            let good = labels.random::<f64>() < params.p;
            let outlier = offsets.random::<f64>() * TAU;
            let delta = if good { theta[i] - theta[j] } else { outlier };
            triples.push((i, j, delta));
            good_mask.push(good);
        }
    }
    let graph = OffsetGraph::new(n, triples)?;
    Ok((graph, GroundTruth::new(theta, good_mask)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallWorldParams {
    pub n: usize,
    /// Vertices `i, j` are joined when `<beta_i, beta_j> > 1 - epsilon`.
    pub epsilon: f64,
    /// Probability that an edge keeps its endpoints (and stays good).
    pub p: f64,
    pub seed: u64,
}

impl SmallWorldParams {
    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        if !(self.epsilon > 0.0 && self.epsilon < 2.0) {
            return Err(invalid(format!("epsilon = {} must lie in (0, 2)", self.epsilon)));
        }
        check_probability("p", self.p)
    }
}

/// `n` points uniform on the unit sphere.
pub fn sphere_points(n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = stream(seed, Stream::Points);
    (0..n)
        .map(|_| loop {
            let v: [f64; 3] = [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ];
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            // a zero draw has probability zero but would poison the normalization
            if r > 0.0 {
                break [v[0] / r, v[1] / r, v[2] / r];
            }
        })
        .collect()
}

/// Neighborhood graph on the sphere with every edge independently rewired
/// with probability `1 - p`.
///
/// A rewired edge is removed and replaced by a uniformly random pair that is
/// neither a self loop nor already present; it carries a uniform offset and is
/// labeled bad. The edge count is preserved.
pub fn gen_small_world(params: &SmallWorldParams) -> Result<(OffsetGraph, GroundTruth)> {
    params.validate()?;
    let n = params.n;
    let theta = uniform_angles(n, params.seed);
    let points = sphere_points(n, params.seed);
    let threshold = 1.0 - params.epsilon;

    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i], points[j]);
            if a[0] * b[0] + a[1] * b[1] + a[2] * b[2] > threshold {
                pairs.push((i, j));
            }
        }
    }
    let full = n * (n - 1) / 2;
    let mut present: HashSet<(usize, usize)> = pairs.iter().copied().collect();
    let mut rewire = stream(params.seed, Stream::Rewiring);
    let mut endpoints = stream(params.seed, Stream::Graph);
    let mut offsets = stream(params.seed, Stream::Offsets);

    let mut triples = Vec::with_capacity(pairs.len());
    let mut good_mask = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        let outlier = offsets.random::<f64>() * TAU;
        // with every pair present there is nowhere to move the edge
        if rewire.random::<f64>() < params.p || present.len() >= full {
            triples.push((i, j, theta[i] - theta[j]));
            good_mask.push(true);
            continue;
        }
        present.remove(&(i, j));
        let (a, b) = loop {
            let a = endpoints.random_range(0..n);
            let b = endpoints.random_range(0..n);
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            if !present.contains(&key) {
                break key;
            }
        };
        present.insert((a, b));
        triples.push((a, b, outlier));
        good_mask.push(false);
    }
    let graph = OffsetGraph::new(n, triples)?;
    Ok((graph, GroundTruth::new(theta, good_mask)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockModelParams {
    pub n: usize,
    /// Erdos-Renyi edge probability of the measurement graph.
    pub edge_probability: f64,
    /// Standard deviation of the error on good measurements, in seconds.
    pub sigma_good: f64,
    pub outlier_fraction: f64,
    /// Outliers are `Uniform[-outlier_scale, outlier_scale]` seconds.
    pub outlier_scale: f64,
    /// Compactification frequency in radians per second.
    pub omega: f64,
    pub seed: u64,
}

impl ClockModelParams {
    /// Parameters with `omega = 0.3 / sigma_good`.
    pub fn with_default_omega(
        n: usize,
        edge_probability: f64,
        sigma_good: f64,
        outlier_fraction: f64,
        outlier_scale: f64,
        seed: u64,
    ) -> Self {
        Self {
            n,
            edge_probability,
            sigma_good,
            outlier_fraction,
            outlier_scale,
            omega: 0.3 / sigma_good,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        check_probability("edge_probability", self.edge_probability)?;
        check_probability("outlier_fraction", self.outlier_fraction)?;
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(invalid(format!("omega = {} must be positive", self.omega)));
        }
        if !(self.sigma_good >= 0.0) || !(self.outlier_scale >= 0.0) {
            return Err(invalid("noise scales must be non-negative"));
        }
        Ok(())
    }

    /// Clock times are drawn from `[0, horizon]`: 1000 noise widths, where the
    /// noise width falls back to `0.3 / omega` for noiseless instances.
    pub fn horizon(&self) -> f64 {
        let width = if self.sigma_good > 0.0 {
            self.sigma_good
        } else {
            0.3 / self.omega
        };
        1000.0 * width
    }
}

/// Noisy time differences `t_ij = t_i - t_j + error`, mapped to offsets
/// `omega * t_ij mod 2pi`. Returns the phase instance and the clock times.
///
/// Planted angles are `omega * t_i mod 2pi`. Edges labeled good carry Gaussian
/// error, so their offsets match the planted angles only approximately.
pub fn gen_clock(params: &ClockModelParams) -> Result<(OffsetGraph, GroundTruth, Vec<f64>)> {
    params.validate()?;
    let n = params.n;
    let horizon = params.horizon();
    let mut clocks = stream(params.seed, Stream::Angles);
    let times: Vec<f64> = (0..n).map(|_| clocks.random::<f64>() * horizon).collect();

    let mut graph_rng = stream(params.seed, Stream::Graph);
    let mut labels = stream(params.seed, Stream::Labels);
    let mut noise = stream(params.seed, Stream::Noise);
    let mut outliers = stream(params.seed, Stream::Offsets);

    let mut triples = Vec::new();
    let mut good_mask = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if graph_rng.random::<f64>() >= params.edge_probability {
                continue;
            }
            let is_outlier = labels.random::<f64>() < params.outlier_fraction;
            let gauss: f64 = StandardNormal.sample(&mut noise);
            let spread = outliers.random::<f64>() * 2.0 - 1.0;
            let error = if is_outlier {
                spread * params.outlier_scale
            } else {
                gauss * params.sigma_good
            };
            let t_ij = times[i] - times[j] + error;
            triples.push((i, j, params.omega * t_ij));
            good_mask.push(!is_outlier);
        }
    }
    let graph = OffsetGraph::new(n, triples)?;
    let theta = times.iter().map(|&t| params.omega * t).collect();
    Ok((graph, GroundTruth::new(theta, good_mask), times))
}
