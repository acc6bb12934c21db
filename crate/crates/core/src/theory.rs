//! Closed-form predictions: eigenvalue laws for the complete and small-world
//! models, recovery thresholds, and the entropy / mutual information bounds
//! for the discretized problem with `L` angle levels.
//!
//! Every function is total over its validated domain and never returns NaN.
//! Regimes where a formula stops applying are reported through [`Regime`].

use serde::Serialize;

use crate::error::{invalid, Result};

/// Which regime a prediction was evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Normal,
    /// No outlier eigenvalue; the value is the bulk edge.
    BelowThreshold,
    /// Noise-free limit; the value is the exact top eigenvalue.
    NearExact,
    /// A bound that cannot exclude anything (probability above 1).
    Vacuous,
}

/// A named closed-form value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryPrediction {
    pub name: &'static str,
    pub value: f64,
    pub aux: Option<f64>,
    pub regime: Regime,
    pub inputs: Vec<(&'static str, f64)>,
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_levels(levels: usize) -> Result<()> {
    if levels < 2 {
        return Err(invalid(format!("L = {levels} must be at least 2")));
    }
    Ok(())
}

fn check_positive(name: &str, x: usize) -> Result<()> {
    if x == 0 {
        return Err(invalid(format!("{name} must be positive")));
    }
    Ok(())
}

/// Right edge of the semicircle for the noise part of the complete model,
/// `2 sqrt(n (1 - p^2))`.
pub fn wigner_edge(n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(2.0 * (n as f64 * (1.0 - p * p)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaLaw {
    pub mu: f64,
    /// Standard deviation; `None` below threshold.
    pub sigma: Option<f64>,
    pub regime: Regime,
}

/// Distribution of the top eigenvalue of `H` (diagonal filled with `p`) in
/// the complete model.
///
/// Above the threshold `np > sqrt(n (1 - p^2))` the top eigenvalue separates
/// from the bulk and is normal with
/// `mu = np / sqrt(1 - p^2) + sqrt(1 - p^2) / p` and
/// `sigma^2 = ((n + 1) p^2 - 1) / (n p^2) * (1 - p^2)`. Below it the top
/// eigenvalue sits at the bulk edge.
pub fn lambda1_law(n: usize, p: f64) -> Result<LambdaLaw> {
    check_p(p)?;
    check_positive("n", n)?;
    let nf = n as f64;
    let q = 1.0 - p * p;
    if q < 1e-12 {
        // H = n z z^*, exactly
        return Ok(LambdaLaw {
            mu: nf * p,
            sigma: Some(0.0),
            regime: Regime::NearExact,
        });
    }
    if nf * p <= (nf * q).sqrt() {
        return Ok(LambdaLaw {
            mu: 2.0 * (nf * q).sqrt(),
            sigma: None,
            regime: Regime::BelowThreshold,
        });
    }
    let mu = nf * p / q.sqrt() + q.sqrt() / p;
    let var = ((nf + 1.0) * p * p - 1.0) / (nf * p * p) * q;
    Ok(LambdaLaw {
        mu,
        sigma: Some(var.max(0.0).sqrt()),
        regime: Regime::Normal,
    })
}

/// Threshold good-edge probability of the eigenvector method on the complete
/// graph, `1 / sqrt(n)`.
pub fn p_threshold_complete(n: usize) -> Result<f64> {
    check_positive("n", n)?;
    Ok(1.0 / (n as f64).sqrt())
}

/// Leading-order expected correlation `(1 + 1/snr)^(-1/2)` as a function of
/// the signal parameter `snr` (`n p^2` on the complete graph, `2 m p^2 / n` in
/// general).
pub fn correlation_from_snr(snr: f64) -> f64 {
    if snr <= 0.0 {
        0.0
    } else {
        (1.0 + 1.0 / snr).powf(-0.5)
    }
}

/// `(1 + 1/(n p^2))^(-1/2)` for the complete model.
pub fn correlation_prediction(n: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(correlation_from_snr(n as f64 * p * p))
}

/// Approximate top eigenvalue of the sparse outlier matrix with `m_bad`
/// uniform bad edges, `2 sqrt(2 m_bad / n)`.
pub fn lambda1_sparse_bad(n: usize, m_bad: usize) -> Result<f64> {
    check_positive("n", n)?;
    Ok(2.0 * (2.0 * m_bad as f64 / n as f64).sqrt())
}

/// Spectral gap of the good graph in the small-world model, `4 m^2 p / n^3`.
pub fn small_world_gap(n: usize, m: usize, p: f64) -> Result<f64> {
    check_p(p)?;
    check_positive("n", n)?;
    let (n, m) = (n as f64, m as f64);
    Ok(4.0 * m * m * p / (n * n * n))
}

/// Sufficient good-edge probability `sqrt(n^5 / (8 m^3))` for the
/// small-world model. Values above 1 are flagged [`Regime::Vacuous`].
pub fn small_world_threshold(n: usize, m: usize) -> Result<(f64, Regime)> {
    check_positive("n", n)?;
    check_positive("m", m)?;
    let (n, m) = (n as f64, m as f64);
    let value = (n.powi(5) / (8.0 * m.powi(3))).sqrt();
    let regime = if value > 1.0 {
        Regime::Vacuous
    } else {
        Regime::Normal
    };
    Ok((value, regime))
}

/// `x log2 x` with the convention `0 log 0 = 0`.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Conditional entropy in bits of one discretized offset given its two
/// angles: the offset is correct with probability `p + (1-p)/L` and each of
/// the other `L - 1` values has probability `(1-p)/L`.
pub fn entropy_hlp(levels: usize, p: f64) -> Result<f64> {
    check_levels(levels)?;
    check_p(p)?;
    let l = levels as f64;
    let wrong = (1.0 - p) / l;
    let right = p + wrong;
    Ok((-(l - 1.0) * xlog2x(wrong) - xlog2x(right)).max(0.0))
}

/// Information in bits carried by one offset, `log2 L - H(L, p)`.
///
/// Evaluated as the divergence of the offset distribution from uniform,
/// `(L-1)(1-p)/L log2(1-p) + (1+(L-1)p)/L log2(1+(L-1)p)`, which avoids the
/// cancellation of the direct difference for small `p`.
pub fn mutual_info_ilp(levels: usize, p: f64) -> Result<f64> {
    check_levels(levels)?;
    check_p(p)?;
    let l = levels as f64;
    let k = l - 1.0;
    let wrong = if p >= 1.0 {
        0.0
    } else {
        k * (1.0 - p) / l * (-p).ln_1p()
    };
    let right = (1.0 + k * p) / l * (k * p).ln_1p();
    Ok(((wrong + right) / std::f64::consts::LN_2).clamp(0.0, l.log2()))
}

/// Leading small-`p` term of [`mutual_info_ilp`] in bits,
/// `(L-1) p^2 / (2 ln 2)`. The next term is `(L-1)(2-L) p^3 / (6 ln 2)`.
pub fn mutual_info_taylor(levels: usize, p: f64) -> Result<f64> {
    check_levels(levels)?;
    check_p(p)?;
    Ok((levels - 1) as f64 * p * p / (2.0 * std::f64::consts::LN_2))
}

/// Fano lower bound on the probability of decoding the whole angle vector
/// wrongly: `max(0, 1 - (m/n) I(L,p) / log2 L - 1/(n log2 L))`.
pub fn fano_error_bound(n: usize, m: usize, levels: usize, p: f64) -> Result<f64> {
    check_positive("n", n)?;
    let info = mutual_info_ilp(levels, p)?;
    let bits = (levels as f64).log2();
    let nf = n as f64;
    Ok((1.0 - m as f64 / nf * info / bits - 1.0 / (nf * bits)).max(0.0))
}

/// Probability below which no algorithm decodes all angles reliably,
/// `sqrt((n/m) 2 log2 L / (L-1))`.
pub fn p_threshold_info(n: usize, m: usize, levels: usize) -> Result<f64> {
    check_positive("n", n)?;
    check_positive("m", m)?;
    check_levels(levels)?;
    let l = levels as f64;
    Ok((n as f64 / m as f64 * 2.0 * l.log2() / (l - 1.0)).sqrt())
}

/// Probability below which individual angles of average degree cannot be
/// decoded, `sqrt((n/m) log2 L / (L-1))`.
pub fn p_threshold_individual(n: usize, m: usize, levels: usize) -> Result<f64> {
    check_positive("n", n)?;
    check_positive("m", m)?;
    check_levels(levels)?;
    let l = levels as f64;
    Ok((n as f64 / m as f64 * l.log2() / (l - 1.0)).sqrt())
}

/// Asymptotic ratio of the eigenvector threshold to the individual-angle
/// threshold on the complete graph, `sqrt((L-1) / (2 log2 L))`.
pub fn threshold_ratio(levels: usize) -> Result<f64> {
    check_levels(levels)?;
    let l = levels as f64;
    Ok(((l - 1.0) / (2.0 * l.log2())).sqrt())
}

/// Every named prediction for one parameter point, in a fixed order.
pub fn predictions(n: usize, m: usize, levels: usize, p: f64) -> Result<Vec<TheoryPrediction>> {
    check_positive("n", n)?;
    check_positive("m", m)?;
    check_levels(levels)?;
    check_p(p)?;
    let inputs = vec![("n", n as f64), ("m", m as f64), ("L", levels as f64), ("p", p)];
    let plain = |name, value| TheoryPrediction {
        name,
        value,
        aux: None,
        regime: Regime::Normal,
        inputs: inputs.clone(),
    };
    let law = lambda1_law(n, p)?;
    let (sw_threshold, sw_regime) = small_world_threshold(n, m)?;
    let m_bad = ((1.0 - p) * m as f64).round() as usize;
    let info = mutual_info_ilp(levels, p)?;
    Ok(vec![
        plain("wigner_edge", wigner_edge(n, p)?),
        TheoryPrediction {
            name: "lambda1_mu",
            value: law.mu,
            aux: law.sigma,
            regime: law.regime,
            inputs: inputs.clone(),
        },
        plain("p_threshold_complete", p_threshold_complete(n)?),
        plain("snr_complete", n as f64 * p * p),
        plain("correlation_complete", correlation_prediction(n, p)?),
        plain("snr_general", 2.0 * m as f64 * p * p / n as f64),
        plain("correlation_general", correlation_from_snr(2.0 * m as f64 * p * p / n as f64)),
        plain("lambda1_sparse_bad", lambda1_sparse_bad(n, m_bad)?),
        plain("small_world_gap", small_world_gap(n, m, p)?),
        TheoryPrediction {
            name: "small_world_threshold",
            value: sw_threshold,
            aux: None,
            regime: sw_regime,
            inputs: inputs.clone(),
        },
        plain("entropy_hlp", entropy_hlp(levels, p)?),
        TheoryPrediction {
            name: "mutual_info_ilp",
            value: info,
            aux: Some(mutual_info_taylor(levels, p)?),
            regime: Regime::Normal,
            inputs: inputs.clone(),
        },
        plain("fano_error_bound", fano_error_bound(n, m, levels, p)?),
        plain("p_threshold_info", p_threshold_info(n, m, levels)?),
        plain("p_threshold_individual", p_threshold_individual(n, m, levels)?),
        plain("threshold_ratio", threshold_ratio(levels)?),
    ])
}
