//! Comparison solvers: anchored least squares and the semidefinite relaxation
//! solved through a low-rank factorization.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::angle::phasor;
use crate::eig::{build_sync_matrix, round_to_angles, SyncMatrix};
use crate::error::{invalid, Result};
use crate::graph::{AngleEstimate, Method, OffsetGraph};
use crate::rng::{stream, Stream};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn unit_norm(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|c| *c /= norm);
    }
    norm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsqrOptions {
    /// Relative residual tolerance of the conjugate gradient solve.
    pub tol: f64,
    /// `None` means `10 n`.
    pub max_iters: Option<usize>,
}

impl Default for LsqrOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: None,
        }
    }
}

/// Least squares estimate: minimizes `sum |z_i - exp(i delta_ij) z_j|^2` over
/// complex `z` with `z = 1` at one anchor vertex per connected component
/// (vertex 0 for its component, the smallest index elsewhere), then rounds
/// `z` entrywise.
///
/// The objective is `z^* (D - H) z` with `D` the degree matrix. Fixing the
/// anchors leaves a Hermitian positive definite system on the remaining
/// vertices, solved by conjugate gradients.
pub fn estimate_lsqr(graph: &OffsetGraph, opts: &LsqrOptions) -> Result<AngleEstimate> {
    let n = graph.n();
    if n == 0 {
        return Err(invalid("empty graph"));
    }
    let h = build_sync_matrix(graph, 0.0);
    let degree: Vec<f64> = graph.degrees().into_iter().map(|d| d as f64).collect();
    let labels = graph.components();
    let components = labels.iter().max().map_or(0, |&c| c + 1);
    let mut anchor = vec![false; n];
    let mut seen = vec![false; components];
    for (v, &c) in labels.iter().enumerate() {
        if !seen[c] {
            seen[c] = true;
            anchor[v] = true;
        }
    }

    // A x restricted to free vertices: (D - H) with anchored columns removed.
    let apply = |x: &[Complex64], out: &mut [Complex64]| {
        for i in 0..n {
            if anchor[i] {
                out[i] = ZERO;
                continue;
            }
            let mut acc = x[i] * degree[i];
            for (j, hij) in h.row(i) {
                if !anchor[j] {
                    acc -= hij * x[j];
                }
            }
            out[i] = acc;
        }
    };
    let mut b = vec![ZERO; n];
    for i in 0..n {
        if !anchor[i] {
            b[i] = h.row(i).filter(|&(j, _)| anchor[j]).map(|(_, hij)| hij).sum();
        }
    }

    let max_iters = opts.max_iters.unwrap_or(10 * n).max(1);
    let (x, iterations, rel_residual, converged) = conjugate_gradient(apply, &b, opts.tol, max_iters);
    let z: Vec<Complex64> = (0..n)
        .map(|i| if anchor[i] { Complex64::new(1.0, 0.0) } else { x[i] })
        .collect();

    let objective: f64 = graph
        .edges()
        .iter()
        .map(|e| (z[e.i] - phasor(e.delta) * z[e.j]).norm_sqr())
        .sum();
    let mut eigvec = z;
    unit_norm(&mut eigvec);
    let (theta_hat, flagged) = round_to_angles(&eigvec);
    Ok(AngleEstimate {
        theta_hat,
        eigvec,
        top_eigval: objective,
        iterations,
        residual: rel_residual,
        converged,
        method: Method::Lsqr,
        flagged,
        shift: 0.0,
        components,
    })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Conjugate gradients for a Hermitian positive definite operator, from a zero
/// start. Returns the solution, iterations, relative residual and whether the
/// tolerance was met.
fn conjugate_gradient(
    apply: impl Fn(&[Complex64], &mut [Complex64]),
    b: &[Complex64],
    tol: f64,
    max_iters: usize,
) -> (Vec<Complex64>, usize, f64, bool) {
    let n = b.len();
    let b_norm = dot(b, b).re.sqrt();
    let mut x = vec![ZERO; n];
    if b_norm == 0.0 {
        return (x, 0, 0.0, true);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![ZERO; n];
    let mut rr = dot(&r, &r).re;
    for it in 1..=max_iters {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap).re;
        if pap <= 0.0 {
            return (x, it, rr.sqrt() / b_norm, false);
        }
        let alpha = rr / pap;
        for k in 0..n {
            x[k] += p[k] * alpha;
            r[k] -= ap[k] * alpha;
        }
        let rr_next = dot(&r, &r).re;
        if rr_next.sqrt() <= tol * b_norm {
            return (x, it, rr_next.sqrt() / b_norm, true);
        }
        let beta = rr_next / rr;
        for k in 0..n {
            p[k] = r[k] + p[k] * beta;
        }
        rr = rr_next;
    }
    (x, max_iters, rr.sqrt() / b_norm, false)
}

/// `sum_ij exp(-i theta_i) H_ij exp(i theta_j)`, i.e.
/// `2 sum_edges cos(delta_ij - theta_i + theta_j)`.
pub fn sdp_objective(graph: &OffsetGraph, theta: &[f64]) -> Result<f64> {
    if theta.len() != graph.n() {
        return Err(invalid(format!(
            "{} angles for a graph on {} vertices",
            theta.len(),
            graph.n()
        )));
    }
    Ok(2.0
        * graph
            .edges()
            .iter()
            .map(|e| (e.delta - theta[e.i] + theta[e.j]).cos())
            .sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    /// Factor width `r`. `None` means `max(3, ceil(sqrt(2n)))`, capped at `n`.
    pub rank: Option<usize>,
    pub max_iters: usize,
    /// Stop once the Riemannian gradient norm falls below
    /// `step_tolerance * max(1, |objective|)`.
    pub step_tolerance: f64,
    pub seed: u64,
    /// Singular values of the factor below `rank_tolerance * largest` do not
    /// count towards the reported rank.
    pub rank_tolerance: f64,
    /// Re-run once from a perturbed optimum and keep the better objective.
    pub restart: bool,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            rank: None,
            max_iters: 20_000,
            step_tolerance: 1e-9,
            seed: 0,
            rank_tolerance: 1e-6,
            restart: true,
        }
    }
}

pub fn default_rank(n: usize) -> usize {
    let r = (2.0 * n as f64).sqrt().ceil() as usize;
    r.max(3).min(n.max(1))
}

/// Output of [`estimate_sdp`].
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub estimate: AngleEstimate,
    /// Numerical rank of the Gram matrix `V V^*`.
    pub theta_rank: usize,
    /// `trace(H V V^*)` at the returned factor.
    pub objective: f64,
    /// Singular values of the factor, descending.
    pub singular_values: Vec<f64>,
    /// Objective after every accepted step of the returned run.
    pub history: Vec<f64>,
    /// Largest deviation of a row norm from 1 seen after any step.
    pub max_row_norm_error: f64,
    /// Row-major `n x r` factor.
    pub factor: Vec<Complex64>,
    pub rank: usize,
}

struct Factor {
    n: usize,
    r: usize,
    data: Vec<Complex64>,
}

impl Factor {
    fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.r..(i + 1) * self.r]
    }

    fn normalize_rows(&mut self) -> f64 {
        let r = self.r;
        let mut worst: f64 = 0.0;
        for row in self.data.chunks_mut(r) {
            unit_norm(row);
            let norm = row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max((norm - 1.0).abs());
        }
        worst
    }

    /// `H V`, row-major like the factor.
    fn left_mul(&self, h: &SyncMatrix, out: &mut [Complex64]) {
        let r = self.r;
        let s = h.diagonal_shift();
        for i in 0..self.n {
            let dst = &mut out[i * r..(i + 1) * r];
            for (d, &v) in dst.iter_mut().zip(self.row(i)) {
                *d = v * s;
            }
            for (j, hij) in h.row(i) {
                for (d, &v) in dst.iter_mut().zip(self.row(j)) {
                    *d += hij * v;
                }
            }
        }
    }
}

fn objective_of(factor: &Factor, hv: &[Complex64]) -> f64 {
    dot(&factor.data, hv).re
}

struct Ascent {
    factor: Factor,
    objective: f64,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
    max_row_norm_error: f64,
    grad_norm: f64,
}

/// Riemannian gradient ascent on the product of unit spheres with Armijo
/// backtracking. Every accepted step increases the objective.
fn ascend(h: &SyncMatrix, mut factor: Factor, opts: &SdpOptions) -> Ascent {
    let len = factor.data.len();
    let mut hv = vec![ZERO; len];
    let mut grad = vec![ZERO; len];
    let mut trial = Factor {
        n: factor.n,
        r: factor.r,
        data: vec![ZERO; len],
    };
    let mut trial_hv = vec![ZERO; len];
    let mut max_row_norm_error = factor.normalize_rows();
    factor.left_mul(h, &mut hv);
    let mut objective = objective_of(&factor, &hv);
    let mut history = vec![objective];
    let mut step = 1.0 / h.row_sum_bound().max(1.0);
    let mut converged = false;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    let r = factor.r;

    while iterations < opts.max_iters {
        iterations += 1;
        // project 2 H V onto the tangent space of each row's sphere
        let mut grad_sq = 0.0;
        for i in 0..factor.n {
            let v = factor.row(i);
            let g = &hv[i * r..(i + 1) * r];
            let radial = dot(v, g).re;
            for k in 0..r {
                let t = (g[k] - v[k] * radial) * 2.0;
                grad[i * r + k] = t;
                grad_sq += t.norm_sqr();
            }
        }
        grad_norm = grad_sq.sqrt();
        if grad_norm <= opts.step_tolerance * objective.abs().max(1.0) {
            converged = true;
            break;
        }

        step *= 2.0;
        let mut accepted = false;
        for _ in 0..60 {
            for ((t, &x), &g) in trial.data.iter_mut().zip(&factor.data).zip(&grad) {
                *t = x + g * step;
            }
            let err = trial.normalize_rows();
            trial.left_mul(h, &mut trial_hv);
            let value = objective_of(&trial, &trial_hv);
            if value >= objective + 1e-4 * step * grad_sq {
                max_row_norm_error = max_row_norm_error.max(err);
                std::mem::swap(&mut factor, &mut trial);
                std::mem::swap(&mut hv, &mut trial_hv);
                objective = value;
                history.push(value);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no step improves the objective at machine precision
            converged = true;
            break;
        }
    }
    Ascent {
        factor,
        objective,
        history,
        iterations,
        converged,
        max_row_norm_error,
        grad_norm,
    }
}

fn random_factor(n: usize, r: usize, seed: u64, purpose: Stream) -> Factor {
    let mut rng = stream(seed, purpose);
    let data = (0..n * r)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    Factor { n, r, data }
}

/// Maximizes `trace(H Theta)` over Hermitian `Theta >= 0` with unit diagonal,
/// writing `Theta = V V^*` with `V` an `n x r` factor of unit-norm rows.
///
/// Angles are read from the top eigenvector of `V V^*` (the top left singular
/// vector of `V`).
pub fn estimate_sdp(graph: &OffsetGraph, opts: &SdpOptions) -> Result<SdpSolution> {
    let n = graph.n();
    if n == 0 {
        return Err(invalid("empty graph"));
    }
    let r = opts.rank.unwrap_or_else(|| default_rank(n));
    if r == 0 || r > n {
        return Err(invalid(format!("factor width {r} must lie in [1, {n}]")));
    }
    if !(opts.rank_tolerance >= 0.0) {
        return Err(invalid("rank_tolerance must be non-negative"));
    }
    let h = build_sync_matrix(graph, 0.0);

    let mut best = ascend(&h, random_factor(n, r, opts.seed, Stream::StartVector), opts);
    let mut total_iterations = best.iterations;
    if opts.restart {
        let mut noise = random_factor(n, r, opts.seed, Stream::Restart);
        for (x, e) in noise.data.iter_mut().zip(&best.factor.data) {
            *x = *e + *x * 0.1 / (r as f64).sqrt();
        }
        let again = ascend(&h, noise, opts);
        total_iterations += again.iterations;
        let worst = best.max_row_norm_error.max(again.max_row_norm_error);
        if again.objective > best.objective {
            best = again;
        }
        best.max_row_norm_error = worst;
    }

    // top eigenvector of V V^* through the r x r Gram matrix V^* V
    let v = DMatrix::from_row_slice(n, r, &best.factor.data);
    let gram = v.adjoint() * &v;
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let singular_values: Vec<f64> = order
        .iter()
        .map(|&k| eig.eigenvalues[k].max(0.0).sqrt())
        .collect();
    let top = &v * eig.eigenvectors.column(order[0]);
    let mut eigvec: Vec<Complex64> = top.iter().copied().collect();
    unit_norm(&mut eigvec);
    let cutoff = opts.rank_tolerance * singular_values[0];
    let theta_rank = singular_values.iter().filter(|&&s| s > cutoff).count();
    let (theta_hat, flagged) = round_to_angles(&eigvec);

    Ok(SdpSolution {
        estimate: AngleEstimate {
            theta_hat,
            eigvec,
            top_eigval: best.objective,
            iterations: total_iterations,
            residual: best.grad_norm,
            converged: best.converged,
            method: Method::Sdp,
            flagged,
            shift: 0.0,
            components: 1,
        },
        theta_rank,
        objective: best.objective,
        singular_values,
        history: best.history,
        max_row_norm_error: best.max_row_norm_error,
        factor: best.factor.data,
        rank: r,
    })
}
