//! Command line flags merged over an optional JSON config file. Flags win.

use std::path::{Path, PathBuf};

use angsync::Method;
use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Complete,
    #[value(name = "smallworld", alias = "small-world")]
    #[serde(alias = "small-world")]
    Smallworld,
    Clock,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Complete => "complete",
            Model::Smallworld => "smallworld",
            Model::Clock => "clock",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys accepted in a `--config` file; names match the long flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<Model>,
    n: Option<usize>,
    m: Option<usize>,
    p: Option<OneOrMany<f64>>,
    epsilon: Option<f64>,
    #[serde(rename = "L")]
    levels: Option<usize>,
    seed: Option<u64>,
    trials: Option<usize>,
    method: Option<OneOrMany<Method>>,
    out: Option<PathBuf>,
    deterministic: Option<bool>,
    strict: Option<bool>,
    hist: Option<usize>,
    shift: Option<f64>,
    sigma: Option<f64>,
    outliers: Option<f64>,
    outlier_scale: Option<f64>,
    edge_prob: Option<f64>,
    omega: Option<f64>,
    tol: Option<f64>,
    max_iters: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with default values for any of the flags below
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub model: Option<Model>,

    /// Number of vertices
    #[arg(long)]
    pub n: Option<usize>,

    /// Number of edges (theory only; defaults to n(n-1)/2)
    #[arg(long)]
    pub m: Option<usize>,

    /// Probability of a good edge; a comma separated list for sweeps
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub p: Option<Vec<f64>>,

    /// Small-world cap parameter: edge iff <b_i, b_j> > 1 - epsilon
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Number of angle levels
    #[arg(long = "L", value_name = "L")]
    pub levels: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub trials: Option<usize>,

    /// eig, sdp or lsqr; a comma separated list for sweeps
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub method: Option<Vec<Method>>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Bit-reproducible output: wall times are written as 0
    #[arg(long)]
    pub deterministic: bool,

    /// Exit with status 3 if a solver does not converge
    #[arg(long)]
    pub strict: bool,

    /// Also write a histogram with this many bins
    #[arg(long, value_name = "BINS")]
    pub hist: Option<usize>,

    /// Diagonal of the sync matrix
    #[arg(long)]
    pub shift: Option<f64>,

    /// Clock model: standard deviation of good time measurements
    #[arg(long)]
    pub sigma: Option<f64>,

    /// Clock model: fraction of outlier measurements
    #[arg(long)]
    pub outliers: Option<f64>,

    /// Clock model: outliers are uniform on [-scale, scale]; defaults to the time horizon
    #[arg(long)]
    pub outlier_scale: Option<f64>,

    /// Clock model: probability that a pair is measured
    #[arg(long)]
    pub edge_prob: Option<f64>,

    /// Clock model: radians per unit time; defaults to 0.3 / sigma
    #[arg(long)]
    pub omega: Option<f64>,

    /// Solver tolerance
    #[arg(long)]
    pub tol: Option<f64>,

    /// Solver iteration budget
    #[arg(long)]
    pub max_iters: Option<usize>,
}

/// Fully merged settings. Fields stay optional where each command has its own default.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub model: Option<Model>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub p: Vec<f64>,
    pub epsilon: Option<f64>,
    pub levels: Option<usize>,
    pub seed: u64,
    pub trials: Option<usize>,
    pub methods: Vec<Method>,
    pub out: Option<PathBuf>,
    pub deterministic: bool,
    pub strict: bool,
    pub hist: Option<usize>,
    pub shift: Option<f64>,
    pub sigma: Option<f64>,
    pub outliers: Option<f64>,
    pub outlier_scale: Option<f64>,
    pub edge_prob: Option<f64>,
    pub omega: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

impl Flags {
    pub fn resolve(self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        Ok(Settings {
            model: self.model.or(file.model),
            n: self.n.or(file.n),
            m: self.m.or(file.m),
            p: self.p.or_else(|| file.p.map(OneOrMany::into_vec)).unwrap_or_default(),
            epsilon: self.epsilon.or(file.epsilon),
            levels: self.levels.or(file.levels),
            seed: self.seed.or(file.seed).unwrap_or(0),
            trials: self.trials.or(file.trials),
            methods: self
                .method
                .or_else(|| file.method.map(OneOrMany::into_vec))
                .unwrap_or_default(),
            out: self.out.or(file.out),
            deterministic: self.deterministic || file.deterministic.unwrap_or(false),
            strict: self.strict || file.strict.unwrap_or(false),
            hist: self.hist.or(file.hist),
            shift: self.shift.or(file.shift),
            sigma: self.sigma.or(file.sigma),
            outliers: self.outliers.or(file.outliers),
            outlier_scale: self.outlier_scale.or(file.outlier_scale),
            edge_prob: self.edge_prob.or(file.edge_prob),
            omega: self.omega.or(file.omega),
            tol: self.tol.or(file.tol),
            max_iters: self.max_iters.or(file.max_iters),
        })
    }
}

impl Settings {
    pub fn require_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Usage("--n is required".into()))
    }

    pub fn single_p(&self) -> Result<f64, CliError> {
        match self.p.as_slice() {
            [p] => Ok(*p),
            [] => Err(CliError::Usage("--p is required".into())),
            _ => Err(CliError::Usage("expected a single value for --p".into())),
        }
    }

    pub fn single_method(&self) -> Result<Method, CliError> {
        match self.methods.as_slice() {
            [] => Ok(Method::Eig),
            [m] => Ok(*m),
            _ => Err(CliError::Usage("expected a single --method".into())),
        }
    }

    pub fn require_out(&self) -> Result<&Path, CliError> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Usage("--out is required".into()))
    }
}
