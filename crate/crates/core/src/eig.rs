//! The eigenvector estimator.
//!
//! The measured offsets are packed into a Hermitian matrix `H` with
//! `H_ij = exp(i delta_ij)`. For consistent data `H` is a phase-modulated
//! adjacency matrix whose top eigenvector carries the planted angles in its
//! entrywise phases; outliers add a random perturbation that the top
//! eigenvector survives as long as the spectral gap does.

use num_complex::Complex64;
use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};

use crate::angle::{arg, phasor, wrap};
use crate::error::{Error, Result};
use crate::graph::{AngleEstimate, Method, OffsetGraph};
use crate::rng::{stream, Stream};

/// Sparse Hermitian matrix with unit-modulus off-diagonal entries at measured
/// pairs and a constant real diagonal.
///
/// Rows are stored in CSR form with real and imaginary parts in separate
/// arrays. Nearly complete graphs additionally get a packed dense copy of the
/// strict upper triangle, which halves memory traffic in the product.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    re: Vec<f64>,
    im: Vec<f64>,
    dense: Option<(Vec<f64>, Vec<f64>)>,
    diagonal_shift: f64,
}

/// Dense copies are kept when at least this fraction of entries is stored.
const DENSE_FILL: f64 = 0.25;
const DENSE_MAX_N: usize = 2048;

/// Builds `H` from the graph; the diagonal is filled with `diagonal_shift`.
pub fn build_sync_matrix(graph: &OffsetGraph, diagonal_shift: f64) -> SyncMatrix {
    let n = graph.n();
    let mut rows: Vec<Vec<(u32, Complex64)>> = vec![Vec::new(); n];
    for e in graph.edges() {
        let h = phasor(e.delta);
        rows[e.i].push((e.j as u32, h));
        rows[e.j].push((e.i as u32, h.conj()));
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(2 * graph.m());
    let mut re = Vec::with_capacity(2 * graph.m());
    let mut im = Vec::with_capacity(2 * graph.m());
    row_ptr.push(0);
    for mut row in rows {
        row.sort_by_key(|&(j, _)| j);
        for (j, h) in row {
            cols.push(j);
            re.push(h.re);
            im.push(h.im);
        }
        row_ptr.push(cols.len());
    }
    let dense = (n <= DENSE_MAX_N && cols.len() as f64 >= DENSE_FILL * (n * n) as f64).then(|| {
        let len = n * (n - 1) / 2;
        let mut dr = vec![0.0; len];
        let mut di = vec![0.0; len];
        for i in 0..n {
            let base = packed_row_start(n, i);
            for k in row_ptr[i]..row_ptr[i + 1] {
                let j = cols[k] as usize;
                if j > i {
                    dr[base + j - i - 1] = re[k];
                    di[base + j - i - 1] = im[k];
                }
            }
        }
        (dr, di)
    });
    SyncMatrix {
        n,
        row_ptr,
        cols,
        re,
        im,
        dense,
        diagonal_shift,
    }
}

/// `sum_j h_j x_j` over contiguous slices, accumulated in four fixed lanes so
/// the result does not depend on how the compiler vectorizes.
/// Offset of row `i` in the packed strict upper triangle.
fn packed_row_start(n: usize, i: usize) -> usize {
    i * (2 * n - i - 1) / 2
}

/// Row `i` of the upper triangle, `h = H[i, i+1..]`, applied both ways:
/// returns `sum_j h_j x_j` and adds `conj(h_j) x_i` into `y[j]`.
#[inline]
#[allow(clippy::too_many_arguments)]
fn upper_row(
    hr: &[f64],
    hi: &[f64],
    xr: &[f64],
    xi: &[f64],
    yr: &mut [f64],
    yi: &mut [f64],
    xr_i: f64,
    xi_i: f64,
) -> (f64, f64) {
    let mut sr = 0.0;
    let mut si = 0.0;
    for k in 0..hr.len() {
        let (a, b, c, d) = (hr[k], hi[k], xr[k], xi[k]);
        sr += a * c - b * d;
        si += a * d + b * c;
        yr[k] += a * xr_i + b * xi_i;
        yi[k] += a * xi_i - b * xr_i;
    }
    (sr, si)
}

impl SyncMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored off-diagonal nonzeros, `2m`.
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn diagonal_shift(&self) -> f64 {
        self.diagonal_shift
    }

    /// Same off-diagonal pattern with a different diagonal.
    pub fn with_shift(&self, diagonal_shift: f64) -> Self {
        Self {
            diagonal_shift,
            ..self.clone()
        }
    }

    /// Stored entries of row `i` as `(column, value)`, excluding the diagonal.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1])
            .map(move |k| (self.cols[k] as usize, Complex64::new(self.re[k], self.im[k])))
    }

    /// Entry `H_ij`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            return Complex64::new(self.diagonal_shift, 0.0);
        }
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&(j as u32)) {
            Ok(k) => Complex64::new(self.re[span.start + k], self.im[span.start + k]),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `y = H x`.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        let n = self.n;
        let s = self.diagonal_shift;
        if let Some((dr, di)) = &self.dense {
            let xr: Vec<f64> = x.iter().map(|c| c.re).collect();
            let xi: Vec<f64> = x.iter().map(|c| c.im).collect();
            let mut yr: Vec<f64> = xr.iter().map(|v| v * s).collect();
            let mut yi: Vec<f64> = xi.iter().map(|v| v * s).collect();
            for i in 0..n {
                let row = packed_row_start(n, i)..packed_row_start(n, i + 1);
                let (head, tail) = yr.split_at_mut(i + 1);
                let (head_i, tail_i) = yi.split_at_mut(i + 1);
                let (sr, si) = upper_row(
                    &dr[row.clone()],
                    &di[row],
                    &xr[i + 1..],
                    &xi[i + 1..],
                    tail,
                    tail_i,
                    xr[i],
                    xi[i],
                );
                head[i] += sr;
                head_i[i] += si;
            }
            for (k, out) in y.iter_mut().enumerate() {
                *out = Complex64::new(yr[k], yi[k]);
            }
            return;
        }
        for i in 0..n {
            let mut sr = 0.0;
            let mut si = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let xj = x[self.cols[k] as usize];
                let (a, b) = (self.re[k], self.im[k]);
                sr += a * xj.re - b * xj.im;
                si += a * xj.im + b * xj.re;
            }
            y[i] = Complex64::new(sr, si) + x[i] * s;
        }
    }

    /// Infinity norm, the largest absolute row sum. Bounds every eigenvalue
    /// in modulus.
    pub fn row_sum_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| (self.row_ptr[i + 1] - self.row_ptr[i]) as f64 + self.diagonal_shift.abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut d = nalgebra::DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
        for i in 0..self.n {
            d[(i, i)] = Complex64::new(self.diagonal_shift, 0.0);
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }
}

/// Result of [`top_eigpair`].
#[derive(Debug, Clone)]
pub struct EigPair {
    /// Rayleigh quotient at exit.
    pub value: f64,
    pub vector: Vec<Complex64>,
    /// Matrix-vector products performed.
    pub iterations: usize,
    /// `||H v - lambda v||` at exit.
    pub residual: f64,
    pub converged: bool,
    /// The constant `c` added to the diagonal during the iteration.
    pub shift: f64,
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|c| *c /= norm);
    }
    norm
}

fn random_unit_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = stream(seed, Stream::StartVector);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    normalize(&mut v);
    v
}

/// Top eigenpair of `H` by power iteration on `H + cI`, `c = ||H||_inf`.
///
/// `H` is indefinite and `|lambda_n|` may be close to `lambda_1`; the shift
/// makes the top eigenvalue dominant in modulus without changing
/// eigenvectors. Stops once `||Hv - lambda v|| <= tol * |lambda|`; otherwise
/// returns the last iterate with `converged = false`.
pub fn top_eigpair(h: &SyncMatrix, tol: f64, max_iters: usize, seed: u64) -> Result<EigPair> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol = {tol} must be positive")));
    }
    if max_iters == 0 {
        return Err(Error::InvalidInput("max_iters must be at least 1".into()));
    }
    if h.nnz() == 0 && h.diagonal_shift == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let n = h.n;
    let c = h.row_sum_bound();
    let mut v = random_unit_vector(n, seed);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut value = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iters {
        h.matvec(&v, &mut w);
        value = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        residual = v
            .iter()
            .zip(&w)
            .map(|(a, b)| (b - a * value).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= tol * value.abs() {
            return Ok(EigPair {
                value,
                vector: v,
                iterations: it,
                residual,
                converged: true,
                shift: c,
            });
        }
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += vi * c;
        }
        if normalize(&mut w) == 0.0 {
            // H v = -c v: v is an eigenvector for -c, the bottom of the spectrum
            break;
        }
        std::mem::swap(&mut v, &mut w);
    }
    Ok(EigPair {
        value,
        vector: v,
        iterations: max_iters,
        residual,
        converged: false,
        shift: c,
    })
}

/// Entries with magnitude below this get angle 0 and are flagged.
pub const ZERO_ENTRY: f64 = 1e-14;

/// Entrywise phases in `[0, 2pi)`, plus the indices that were too small to
/// carry a phase.
pub fn round_to_angles(v: &[Complex64]) -> (Vec<f64>, Vec<usize>) {
    let mut flagged = Vec::new();
    let theta = v
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            if c.norm() < ZERO_ENTRY {
                flagged.push(k);
                0.0
            } else {
                arg(c)
            }
        })
        .collect();
    (theta, flagged)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    /// Relative eigen-residual tolerance.
    pub tol: f64,
    /// `None` means `10 n ln n`.
    pub max_iters: Option<usize>,
    pub diagonal_shift: f64,
    pub seed: u64,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: None,
            diagonal_shift: 0.0,
            seed: 0,
        }
    }
}

pub fn default_max_iters(n: usize) -> usize {
    let n = n as f64;
    ((10.0 * n * n.ln()).ceil() as usize).max(1)
}

/// Builds `H`, finds its top eigenvector and rounds it to angles.
pub fn estimate_eig(graph: &OffsetGraph, opts: &EigOptions) -> Result<AngleEstimate> {
    let h = build_sync_matrix(graph, opts.diagonal_shift);
    let max_iters = opts.max_iters.unwrap_or_else(|| default_max_iters(graph.n()));
    let pair = top_eigpair(&h, opts.tol, max_iters, opts.seed)?;
    let (theta_hat, flagged) = round_to_angles(&pair.vector);
    Ok(AngleEstimate {
        theta_hat,
        eigvec: pair.vector,
        top_eigval: pair.value,
        iterations: pair.iterations,
        residual: pair.residual,
        converged: pair.converged,
        method: Method::Eig,
        flagged,
        shift: pair.shift,
        components: 1,
    })
}

/// Mean of `|exp(i(delta_ij + delta_jk + delta_ki)) - 1|` over sampled
/// triangles. Zero when every sampled cycle is consistent.
pub fn triangle_consistency_score(graph: &OffsetGraph, sample_size: usize, seed: u64) -> Result<f64> {
    if sample_size == 0 {
        return Err(Error::InvalidInput("sample_size must be at least 1".into()));
    }
    if graph.m() == 0 {
        return Err(Error::NoTriangles);
    }
    let adj = graph.adjacency();
    let mut sorted = adj.clone();
    for row in &mut sorted {
        row.sort_by_key(|a| a.0);
    }
    let offset = |a: usize, b: usize| -> Option<f64> {
        sorted[a]
            .binary_search_by(|probe| probe.0.cmp(&b))
            .ok()
            .map(|k| sorted[a][k].1)
    };
    let cycle_error = |i: usize, j: usize, k: usize| -> Option<f64> {
        let sum = offset(i, j)? + offset(j, k)? + offset(k, i)?;
        Some((phasor(wrap(sum)) - 1.0).norm())
    };

    let mut rng = stream(seed, Stream::Triangles);
    let edges = graph.edges();
    let mut total = 0.0;
    let mut found = 0;
    let attempts = sample_size.saturating_mul(100);
    for _ in 0..attempts {
        if found == sample_size {
            break;
        }
        let e = edges[rng.random_range(0..edges.len())];
        let nbrs = &adj[e.i];
        let (k, _) = nbrs[rng.random_range(0..nbrs.len())];
        if k == e.j {
            continue;
        }
        if let Some(err) = cycle_error(e.i, e.j, k) {
            total += err;
            found += 1;
        }
    }
    if found > 0 {
        return Ok(total / found as f64);
    }

    // Sampling found nothing; enumerate to tell a sparse triangle set apart
    // from none at all.
    let mut triangles = Vec::new();
    for e in edges {
        for &(k, _) in &adj[e.i] {
            if k > e.j && offset(e.j, k).is_some() {
                triangles.push((e.i, e.j, k));
            }
        }
    }
    if triangles.is_empty() {
        return Err(Error::NoTriangles);
    }
    for _ in 0..sample_size {
        let (i, j, k) = triangles[rng.random_range(0..triangles.len())];
        total += cycle_error(i, j, k).expect("enumerated triangle");
    }
    Ok(total / sample_size as f64)
}
