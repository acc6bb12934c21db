use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use angsync::baselines::{estimate_lsqr, estimate_sdp, sdp_objective, LsqrOptions, SdpOptions};
use angsync::eig::{build_sync_matrix, estimate_eig, EigOptions};
use angsync::generators::{
    gen_clock, gen_complete, gen_small_world, ClockModelParams, CompleteModelParams, SmallWorldParams,
};
use angsync::io::{read_instance, write_instance};
use angsync::metrics::{correlation_report, default_theta0, sce, sce_f, CorrelationReport};
use angsync::spectra::{full_spectrum, histogram};
use angsync::theory::predictions;
use angsync::{AngleEstimate, GroundTruth, Method, OffsetGraph};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::settings::{Model, Settings};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Sidecar of an instance file: `<instance>.json`.
pub fn sidecar_path(instance: &Path) -> PathBuf {
    let mut name = instance.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// A path next to `base` with `suffix` inserted before the extension.
pub fn derived_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    base.with_file_name(name)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub struct Instance {
    pub graph: OffsetGraph,
    pub truth: GroundTruth,
    pub times: Option<Vec<f64>>,
    pub params: serde_json::Value,
}

/// Generates one instance of the configured model with the given seed and p.
pub fn build_instance(s: &Settings, p: f64, seed: u64) -> Result<Instance, CliError> {
    let n = s.require_n()?;
    match s.model.unwrap_or(Model::Complete) {
        Model::Complete => {
            let params = CompleteModelParams { n, p, seed };
            let (graph, truth) = gen_complete(&params)?;
            Ok(Instance { graph, truth, times: None, params: json!(params) })
        }
        Model::Smallworld => {
            let epsilon = s
                .epsilon
                .ok_or_else(|| CliError::Usage("--epsilon is required for the small-world model".into()))?;
            let params = SmallWorldParams { n, epsilon, p, seed };
            let (graph, truth) = gen_small_world(&params)?;
            Ok(Instance { graph, truth, times: None, params: json!(params) })
        }
        Model::Clock => {
            let sigma = s.sigma.unwrap_or(1.0);
            let mut params = ClockModelParams::with_default_omega(
                n,
                s.edge_prob.unwrap_or(1.0),
                sigma,
                1.0 - p,
                0.0,
                seed,
            );
            if let Some(omega) = s.omega {
                params.omega = omega;
            }
            if let Some(f) = s.outliers {
                params.outlier_fraction = f;
            }
            params.outlier_scale = s.outlier_scale.unwrap_or_else(|| params.horizon());
            let (graph, truth, times) = gen_clock(&params)?;
            Ok(Instance { graph, truth, times: Some(times), params: json!(params) })
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct Metadata {
    pub schema_version: u32,
    pub model: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub m_good: usize,
    pub m_bad: usize,
    pub connected: bool,
    pub theta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub times: Option<Vec<f64>>,
}

pub fn generate(s: &Settings) -> Result<(), CliError> {
    let out = s.require_out()?;
    let p = match s.model {
        Some(Model::Clock) if s.p.is_empty() => 1.0,
        _ => s.single_p()?,
    };
    let inst = build_instance(s, p, s.seed)?;
    let connected = inst.graph.is_connected();
    if !connected {
        eprintln!("warning: generated graph is disconnected");
    }
    let mut w = create(out)?;
    write_instance(&mut w, &inst.graph, Some(&inst.truth.good_mask))?;
    w.flush()?;

    let meta = Metadata {
        schema_version: SCHEMA_VERSION,
        model: s.model.unwrap_or(Model::Complete).as_str().into(),
        params: inst.params,
        seed: s.seed,
        n: inst.graph.n(),
        m: inst.graph.m(),
        m_good: inst.truth.m_good(),
        m_bad: inst.truth.m_bad(),
        connected,
        theta: inst.truth.theta,
        times: inst.times,
    };
    let meta_path = sidecar_path(out);
    let mut w = create(&meta_path)?;
    serde_json::to_writer_pretty(&mut w, &meta)?;
    w.flush()?;
    println!(
        "wrote {} (n={}, m={}, good={}, bad={}) and {}",
        out.display(),
        meta.n,
        meta.m,
        meta.m_good,
        meta.m_bad,
        meta_path.display()
    );
    Ok(())
}

pub struct Solved {
    pub estimate: AngleEstimate,
    /// Rank of the relaxation solution, for `sdp`.
    pub theta_rank: Option<usize>,
    pub wall_ms: f64,
}

pub fn run_method(graph: &OffsetGraph, method: Method, s: &Settings, seed: u64) -> Result<Solved, CliError> {
    let start = Instant::now();
    let (estimate, theta_rank) = match method {
        Method::Eig => {
            let mut opts = EigOptions { seed, max_iters: s.max_iters, ..Default::default() };
            if let Some(tol) = s.tol {
                opts.tol = tol;
            }
            if let Some(shift) = s.shift {
                opts.diagonal_shift = shift;
            }
            (estimate_eig(graph, &opts)?, None)
        }
        Method::Sdp => {
            let mut opts = SdpOptions { seed, ..Default::default() };
            if let Some(tol) = s.tol {
                opts.step_tolerance = tol;
            }
            if let Some(iters) = s.max_iters {
                opts.max_iters = iters;
            }
            let sol = estimate_sdp(graph, &opts)?;
            (sol.estimate, Some(sol.theta_rank))
        }
        Method::Lsqr => {
            let mut opts = LsqrOptions { max_iters: s.max_iters, ..Default::default() };
            if let Some(tol) = s.tol {
                opts.tol = tol;
            }
            (estimate_lsqr(graph, &opts)?, None)
        }
    };
    let wall_ms = if s.deterministic {
        0.0
    } else {
        start.elapsed().as_secs_f64() * 1e3
    };
    Ok(Solved { estimate, theta_rank, wall_ms })
}

#[derive(Serialize)]
struct SolveReport {
    method: Method,
    n: usize,
    m: usize,
    components: usize,
    /// Top eigenvalue (eig), relaxation value (sdp) or residual sum of squares (lsqr).
    top_eigval: f64,
    /// Quadratic form at the rounded angles; comparable across methods.
    objective: f64,
    iterations: usize,
    converged: bool,
    residual: f64,
    wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_rank: Option<usize>,
    theta0: f64,
    sce: usize,
    sce_f: f64,
    rho1: Option<f64>,
    rho2: Option<f64>,
    flagged: usize,
}

fn load_truth(path: &Path, n: usize) -> Result<Vec<f64>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
    let meta: Metadata = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| CliError::Usage(format!("bad metadata {}: {e}", path.display())))?;
    if meta.theta.len() != n {
        return Err(CliError::Usage(format!(
            "metadata {} has {} angles for {n} vertices",
            path.display(),
            meta.theta.len()
        )));
    }
    Ok(meta.theta)
}

pub fn solve(instance: &Path, truth: Option<&Path>, s: &Settings) -> Result<(), CliError> {
    let file =
        File::open(instance).map_err(|e| CliError::Io(format!("cannot open {}: {e}", instance.display())))?;
    let (graph, _) = read_instance(BufReader::new(file))?;
    let method = s.single_method()?;
    let truth_path = match truth {
        Some(p) => Some(p.to_path_buf()),
        None => Some(sidecar_path(instance)).filter(|p| p.exists()),
    };
    let theta_true = truth_path.map(|p| load_truth(&p, graph.n())).transpose()?;

    let solved = run_method(&graph, method, s, s.seed)?;
    let est = &solved.estimate;
    let theta0 = default_theta0(s.levels.unwrap_or(64));
    let (sce_count, sce_value, rho1, rho2) = match &theta_true {
        Some(theta) => {
            let CorrelationReport { rho1, rho2, sce, sce_f } =
                correlation_report(est, theta, &graph, theta0, theta0)?;
            (sce, sce_f, Some(rho1), Some(rho2))
        }
        None => (
            sce(&est.theta_hat, &graph, theta0)?,
            sce_f(&est.theta_hat, &graph, theta0)?,
            None,
            None,
        ),
    };
    let report = SolveReport {
        method,
        n: graph.n(),
        m: graph.m(),
        components: est.components,
        top_eigval: est.top_eigval,
        objective: sdp_objective(&graph, &est.theta_hat)?,
        iterations: est.iterations,
        converged: est.converged,
        residual: est.residual,
        wall_ms: solved.wall_ms,
        theta_rank: solved.theta_rank,
        theta0,
        sce: sce_count,
        sce_f: sce_value,
        rho1,
        rho2,
        flagged: est.flagged.len(),
    };
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(out) = &s.out {
        let mut w = create(out)?;
        writeln!(w, "{text}")?;
        w.flush()?;
    }
    if s.strict && !est.converged {
        return Err(CliError::NotConverged(format!(
            "{method} did not converge in {} iterations (residual {:.3e})",
            est.iterations, est.residual
        )));
    }
    Ok(())
}

pub fn spectrum(instance: Option<&Path>, s: &Settings) -> Result<(), CliError> {
    let out = s.require_out()?;
    let (graph, shift) = match instance {
        Some(path) => {
            let file =
                File::open(path).map_err(|e| CliError::Io(format!("cannot open {}: {e}", path.display())))?;
            (read_instance(BufReader::new(file))?.0, s.shift.unwrap_or(0.0))
        }
        None => {
            let p = s.single_p()?;
            (build_instance(s, p, s.seed)?.graph, s.shift.unwrap_or(0.0))
        }
    };
    let values = full_spectrum(&build_sync_matrix(&graph, shift))?;
    let mut w = csv::Writer::from_writer(create(out)?);
    w.write_record(["index", "eigenvalue"])?;
    for (k, v) in values.iter().enumerate() {
        w.write_record([k.to_string(), v.to_string()])?;
    }
    w.flush()?;
    if let Some(bins) = s.hist {
        let hist_path = derived_path(out, "_hist");
        let mut w = csv::Writer::from_writer(create(&hist_path)?);
        w.write_record(["bin_center", "count"])?;
        for (center, count) in histogram(&values, bins)? {
            w.write_record([center.to_string(), count.to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}

pub fn theory(s: &Settings) -> Result<(), CliError> {
    let n = s.require_n()?;
    let m = s.m.unwrap_or(n * n.saturating_sub(1) / 2);
    let levels = s.levels.unwrap_or(2);
    let p = s.single_p()?;
    let rows = predictions(n, m, levels, p)?;
    let sink: Box<dyn Write> = match &s.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["name", "value", "aux"])?;
    for r in rows {
        w.write_record([r.name.to_string(), r.value.to_string(), r.aux.map(|a| a.to_string()).unwrap_or_default()])?;
    }
    w.flush()?;
    Ok(())
}
