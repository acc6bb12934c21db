//! Problem instances and estimates.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{circdist, wrap};
use crate::error::{invalid, Result};

/// One measured offset `delta ~ theta_i - theta_j`, stored with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub delta: f64,
}

/// Measurement graph on `n` vertices with an offset angle on every edge.
///
/// Each unordered pair appears at most once. The reverse offset
/// `delta_ji = -delta_ij mod 2pi` is implied and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl OffsetGraph {
    /// Builds a graph from `(i, j, delta)` triples.
    ///
    /// Pairs given as `i > j` are flipped together with their offset, and
    /// every offset is reduced into `[0, 2pi)`. Self loops, out of range
    /// indices, duplicate pairs and non-finite offsets are rejected.
    pub fn new(n: usize, triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for (a, b, delta) in triples {
            if a >= n || b >= n {
                return Err(invalid(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if a == b {
                return Err(invalid(format!("self loop at vertex {a}")));
            }
            if !delta.is_finite() {
                return Err(invalid(format!("non-finite offset on edge ({a},{b})")));
            }
            let (i, j, delta) = if a < b { (a, b, delta) } else { (b, a, -delta) };
            if !seen.insert((i, j)) {
                return Err(invalid(format!("duplicate edge ({i},{j})")));
            }
            edges.push(Edge {
                i,
                j,
                delta: wrap(delta),
            });
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbor lists with the directed offset `delta_{v,u}` for each neighbor `u`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.i].push((e.j, e.delta));
            adj[e.j].push((e.i, wrap(-e.delta)));
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.i] += 1;
            deg[e.j] += 1;
        }
        deg
    }

    /// Connected component label for every vertex, labels numbered from 0 in
    /// order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &(u, _) in &adj[v] {
                    if label[u] == usize::MAX {
                        label[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().iter().all(|&c| c == 0)
    }
}

/// Planted angles and good/bad labels of a synthetic instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub theta: Vec<f64>,
    pub good_mask: Vec<bool>,
}

impl GroundTruth {
    pub fn new(theta: Vec<f64>, good_mask: Vec<bool>) -> Self {
        let theta = theta.into_iter().map(wrap).collect();
        Self { theta, good_mask }
    }

    pub fn m_good(&self) -> usize {
        self.good_mask.iter().filter(|&&g| g).count()
    }

    pub fn m_bad(&self) -> usize {
        self.good_mask.len() - self.m_good()
    }

    /// Checks lengths against `graph`, and that every good edge carries the
    /// exact offset of the planted angles to within `tol`.
    pub fn validate(&self, graph: &OffsetGraph, tol: f64) -> Result<()> {
        if self.theta.len() != graph.n() {
            return Err(invalid(format!(
                "ground truth has {} angles, graph has {} vertices",
                self.theta.len(),
                graph.n()
            )));
        }
        if self.good_mask.len() != graph.m() {
            return Err(invalid(format!(
                "ground truth has {} edge labels, graph has {} edges",
                self.good_mask.len(),
                graph.m()
            )));
        }
        for (e, &good) in graph.edges().iter().zip(&self.good_mask) {
            if good {
                let err = circdist(self.theta[e.i] - self.theta[e.j], e.delta);
                if err > tol {
                    return Err(invalid(format!(
                        "good edge ({},{}) off by {err:e}",
                        e.i, e.j
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Eig,
    Sdp,
    Lsqr,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Eig, Method::Sdp, Method::Lsqr];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Eig => "eig",
            Method::Sdp => "sdp",
            Method::Lsqr => "lsqr",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eig" => Ok(Method::Eig),
            "sdp" => Ok(Method::Sdp),
            "lsqr" => Ok(Method::Lsqr),
            other => Err(invalid(format!("unknown method {other:?}"))),
        }
    }
}

/// Estimated angles together with the complex vector they were rounded from.
#[derive(Debug, Clone)]
pub struct AngleEstimate {
    pub theta_hat: Vec<f64>,
    /// Unit Euclidean norm.
    pub eigvec: Vec<Complex64>,
    /// Top eigenvalue for `eig`, the relaxation objective for `sdp`, and the
    /// residual sum of squares for `lsqr`.
    pub top_eigval: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub method: Method,
    /// Entries whose magnitude was too small to define an angle; these were
    /// assigned angle 0.
    pub flagged: Vec<usize>,
    /// Diagonal shift added during power iteration, 0 for other methods.
    pub shift: f64,
    /// Number of connected components the solver handled independently.
    pub components: usize,
}
