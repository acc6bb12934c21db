//! Parameter sweeps: one CSV row per (p, trial, method) and an aggregate of
//! means and standard deviations per (p, method).

use angsync::baselines::sdp_objective;
use angsync::metrics::{rho1, rho2};
use angsync::rng::derive_seed;
use angsync::theory::{
    correlation_from_snr, correlation_prediction, lambda1_law, lambda1_sparse_bad, small_world_gap, wigner_edge,
};
use angsync::Method;
use rayon::prelude::*;
use serde::Serialize;

use crate::commands::{build_instance, derived_path, run_method, SCHEMA_VERSION};
use crate::settings::{Model, Settings};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RunRow {
    pub schema_version: u32,
    pub model: &'static str,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub seed: u64,
    pub method: Method,
    pub rho1: f64,
    pub rho2: f64,
    pub lambda1: Option<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub wall_ms: f64,
    pub converged: bool,
    pub pred_snr: f64,
    pub pred_correlation: f64,
    pub pred_lambda1: Option<f64>,
    pub pred_bulk_edge: Option<f64>,
    pub pred_gap: Option<f64>,
}

#[derive(Debug, Serialize)]
struct AggregateRow {
    schema_version: u32,
    model: &'static str,
    n: usize,
    p: f64,
    method: Method,
    trials: usize,
    m_mean: f64,
    rho1_mean: f64,
    rho1_std: f64,
    rho2_mean: f64,
    rho2_std: f64,
    lambda1_mean: Option<f64>,
    lambda1_std: Option<f64>,
    objective_mean: f64,
    objective_std: f64,
    iterations_mean: f64,
    not_converged: usize,
    pred_snr_mean: f64,
    pred_correlation_mean: f64,
}

struct Predicted {
    snr: f64,
    correlation: f64,
    lambda1: Option<f64>,
    bulk_edge: Option<f64>,
    gap: Option<f64>,
}

fn predicted(model: Model, n: usize, m: usize, p: f64) -> Result<Predicted, CliError> {
    Ok(match model {
        Model::Complete => Predicted {
            snr: n as f64 * p * p,
            correlation: correlation_prediction(n, p)?,
            lambda1: Some(lambda1_law(n, p)?.mu),
            bulk_edge: Some(wigner_edge(n, p)?),
            gap: None,
        },
        Model::Smallworld | Model::Clock => {
            let snr = 2.0 * m as f64 * p * p / n as f64;
            let m_bad = ((1.0 - p) * m as f64).round() as usize;
            Predicted {
                snr,
                correlation: correlation_from_snr(snr),
                lambda1: None,
                bulk_edge: Some(lambda1_sparse_bad(n, m_bad)?),
                gap: (model == Model::Smallworld)
                    .then(|| small_world_gap(n, m, p))
                    .transpose()?,
            }
        }
    })
}

fn one_trial(s: &Settings, model: Model, p_index: usize, p: f64, trial: usize) -> Result<Vec<RunRow>, CliError> {
    let seed = derive_seed(s.seed, p_index as u64, trial as u64);
    let inst = build_instance(s, p, seed)?;
    let (graph, truth) = (&inst.graph, &inst.truth);
    let pred = predicted(model, graph.n(), graph.m(), p)?;
    s.methods
        .iter()
        .map(|&method| {
            let solved = run_method(graph, method, s, seed)?;
            let est = &solved.estimate;
            Ok(RunRow {
                schema_version: SCHEMA_VERSION,
                model: model.as_str(),
                n: graph.n(),
                m: graph.m(),
                p,
                seed,
                method,
                rho1: rho1(&est.theta_hat, &truth.theta)?,
                rho2: rho2(&est.eigvec, &truth.theta)?,
                lambda1: (method == Method::Eig).then_some(est.top_eigval),
                objective: sdp_objective(graph, &est.theta_hat)?,
                iterations: est.iterations,
                wall_ms: solved.wall_ms,
                converged: est.converged,
                pred_snr: pred.snr,
                pred_correlation: pred.correlation,
                pred_lambda1: pred.lambda1,
                pred_bulk_edge: pred.bulk_edge,
                pred_gap: pred.gap,
            })
        })
        .collect()
}

/// Runs every trial; rows come back ordered by (p index, trial, method)
/// whatever the scheduling.
pub fn run_sweep(s: &Settings) -> Result<Vec<RunRow>, CliError> {
    let model = s.model.unwrap_or(Model::Complete);
    if s.p.is_empty() {
        return Err(CliError::Usage("the p grid is empty".into()));
    }
    if s.p.iter().enumerate().any(|(k, p)| s.p[..k].contains(p)) {
        return Err(CliError::Usage("the p grid has repeated values".into()));
    }
    let trials = s.trials.unwrap_or(20);
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let jobs: Vec<(usize, f64, usize)> = s
        .p
        .iter()
        .enumerate()
        .flat_map(|(k, &p)| (0..trials).map(move |t| (k, p, t)))
        .collect();
    let per_job: Vec<Vec<RunRow>> = jobs
        .par_iter()
        .map(|&(k, p, t)| one_trial(s, model, k, p, t))
        .collect::<Result<_, _>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn aggregate(rows: &[RunRow], s: &Settings) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for &p in &s.p {
        for &method in &s.methods {
            let group: Vec<&RunRow> = rows.iter().filter(|r| r.p == p && r.method == method).collect();
            if group.is_empty() {
                continue;
            }
            let col = |f: &dyn Fn(&RunRow) -> f64| group.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let (rho1_mean, rho1_std) = mean_std(&col(&|r| r.rho1));
            let (rho2_mean, rho2_std) = mean_std(&col(&|r| r.rho2));
            let (objective_mean, objective_std) = mean_std(&col(&|r| r.objective));
            let lambdas: Vec<f64> = group.iter().filter_map(|r| r.lambda1).collect();
            let lambda = (!lambdas.is_empty()).then(|| mean_std(&lambdas));
            out.push(AggregateRow {
                schema_version: SCHEMA_VERSION,
                model: group[0].model,
                n: group[0].n,
                p,
                method,
                trials: group.len(),
                m_mean: mean_std(&col(&|r| r.m as f64)).0,
                rho1_mean,
                rho1_std,
                rho2_mean,
                rho2_std,
                lambda1_mean: lambda.map(|l| l.0),
                lambda1_std: lambda.map(|l| l.1),
                objective_mean,
                objective_std,
                iterations_mean: mean_std(&col(&|r| r.iterations as f64)).0,
                not_converged: group.iter().filter(|r| !r.converged).count(),
                pred_snr_mean: mean_std(&col(&|r| r.pred_snr)).0,
                pred_correlation_mean: mean_std(&col(&|r| r.pred_correlation)).0,
            });
        }
    }
    out
}

pub fn sweep(s: &Settings) -> Result<(), CliError> {
    let out = s.require_out()?.to_path_buf();
    let mut s = s.clone();
    if s.methods.is_empty() {
        s.methods = vec![Method::Eig];
    }
    let rows = run_sweep(&s)?;

    let mut w = csv::Writer::from_path(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;

    let agg_path = derived_path(&out, "_aggregate");
    let mut w =
        csv::Writer::from_path(&agg_path).map_err(|e| CliError::Io(format!("{}: {e}", agg_path.display())))?;
    for r in aggregate(&rows, &s) {
        w.serialize(r)?;
    }
    w.flush()?;

    let failed = rows.iter().filter(|r| !r.converged).count();
    eprintln!(
        "{} runs written to {} (aggregate {})",
        rows.len(),
        out.display(),
        agg_path.display()
    );
    if s.strict && failed > 0 {
        return Err(CliError::NotConverged(format!("{failed} runs did not converge")));
    }
    Ok(())
}
