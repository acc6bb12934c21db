//! Dense spectra of `H` for moderate `n`, and the small amount of post
//! processing needed to turn them into plots: histograms and eigenvalue
//! clusters.

use crate::eig::SyncMatrix;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_DENSE_LIMIT: usize = 5000;

/// All eigenvalues of `H`, descending.
pub fn full_spectrum(h: &SyncMatrix) -> Result<Vec<f64>> {
    full_spectrum_with_limit(h, DEFAULT_DENSE_LIMIT)
}

pub fn full_spectrum_with_limit(h: &SyncMatrix, limit: usize) -> Result<Vec<f64>> {
    if h.n() > limit {
        return Err(Error::TooLarge { n: h.n(), limit });
    }
    let mut values: Vec<f64> = h.to_dense().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// The `k` largest eigenvalues, descending.
pub fn top_k_spectrum(h: &SyncMatrix, k: usize) -> Result<Vec<f64>> {
    if k > h.n() {
        return Err(invalid(format!("k = {k} exceeds n = {}", h.n())));
    }
    let mut all = full_spectrum(h)?;
    all.truncate(k);
    Ok(all)
}

/// Equal-width histogram over `[min, max]` as `(bin_center, count)`.
/// The maximum lands in the last bin.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<(f64, usize)>> {
    if values.is_empty() {
        return Err(invalid("cannot histogram an empty sample"));
    }
    if bins == 0 {
        return Err(invalid("bins must be at least 1"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("non-finite value in histogram input"));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let k = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[k] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (lo + (k as f64 + 0.5) * width, c))
        .collect())
}

/// Splits a descending sequence into runs of nearly equal values. A new
/// cluster starts whenever consecutive values differ by more than
/// `rel_gap * |values[0]|`. Returns the cluster sizes in order.
pub fn cluster_sizes(values: &[f64], rel_gap: f64) -> Vec<usize> {
    let Some(&first) = values.first() else {
        return Vec::new();
    };
    let gap = rel_gap * first.abs();
    let mut sizes = vec![1];
    for w in values.windows(2) {
        if w[0] - w[1] > gap {
            sizes.push(1);
        } else {
            *sizes.last_mut().unwrap() += 1;
        }
    }
    sizes
}
