//! Helpers for angles stored as radians in `[0, 2pi)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// Reduces `x` into `[0, 2pi)`.
///
/// `rem_euclid` can return exactly `2pi` for tiny negative inputs, which is
/// folded back to zero.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Circular distance on the unit circle, in `[0, pi]`.
pub fn circdist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TAU);
    d.min(TAU - d)
}

/// Unit phasor `exp(i x)`.
#[inline]
pub fn phasor(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// Argument of `z` mapped to `[0, 2pi)`.
#[inline]
pub fn arg(z: Complex64) -> f64 {
    wrap(z.arg())
}

/// Adds `shift` to every angle and rewraps.
pub fn rotate(theta: &[f64], shift: f64) -> Vec<f64> {
    theta.iter().map(|&t| wrap(t + shift)).collect()
}

/// Rotates `estimate` by the phase of the mean phasor of `truth - estimate`,
/// so per-angle errors can be reported without the global gauge.
pub fn align(estimate: &[f64], truth: &[f64]) -> Vec<f64> {
    let mean: Complex64 = estimate
        .iter()
        .zip(truth)
        .map(|(&e, &t)| phasor(t - e))
        .sum();
    if mean.norm() == 0.0 {
        return estimate.to_vec();
    }
    rotate(estimate, mean.arg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_lands_in_range() {
        for x in [-1e-18, -TAU, TAU, 3.0 * TAU + 0.5, -0.25, 0.0] {
            let w = wrap(x);
            assert!((0.0..TAU).contains(&w), "{x} -> {w}");
        }
        assert!((wrap(-0.25) - (TAU - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn circdist_is_symmetric_and_bounded() {
        assert!((circdist(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
        assert!((circdist(0.0, PI) - PI).abs() < 1e-12);
        assert_eq!(circdist(1.0, 1.0), 0.0);
        assert!((circdist(-3.0, 3.0) - circdist(3.0, -3.0)).abs() < 1e-15);
    }

    #[test]
    fn align_removes_global_shift() {
        let truth = [0.1, 1.2, 2.3, 4.0];
        let est = rotate(&truth, 2.5);
        let aligned = align(&est, &truth);
        for (a, t) in aligned.iter().zip(truth) {
            assert!(circdist(*a, t) < 1e-12);
        }
    }
}
