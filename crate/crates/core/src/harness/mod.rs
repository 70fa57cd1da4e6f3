//! Experiment harness: JSON run configurations, algorithm dispatch, CSV
//! trace emission, and the per-algorithm summary table.
//!
//! A single config names a problem, a list of algorithms, an initial
//! point, tolerances, and a budget. `run_experiment` executes every
//! algorithm on the shared oracle and writes one trace file per algorithm
//! plus a `summary.csv` with the final objective value and criticality
//! measures. Everything except the wall-time column is deterministic for
//! a fixed config and seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ahom::{ahom_run, AhomConfig, IterationRecord, RunStatus, StepKind};
use crate::baselines::{arc_run, gd_run, tr_run, BaselineConfig, BaselineRecord, BaselineResult};
use crate::cubic_subsolver::SubsolverMode;
use crate::data_ingest::{load_libsvm_file, map_labels, synthetic_dataset, IngestError};
use crate::linalg;
use crate::problems::{
    make_coercive, make_logistic, make_monkey, make_quadratic, FiniteDifference, ObjectiveOracle,
    ProblemError, ProblemMeta,
};
use crate::third_order::critical_measures;

/// The exact trace header; traces must never deviate from it.
pub const TRACE_HEADER: &str =
    "iter,wall_time_s,f,chi1,chi2,chi3,sigma,kappa,rho,phi,delta,step_kind,step_norm";

/// Header of the summary table (Table-3-shaped: value plus measures).
pub const SUMMARY_HEADER: &str =
    "algorithm,status,iterations,f,grad_norm,lambda_min,tensor_norm";

/// Maximum relative derivative error tolerated by `check-derivatives`.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-4;

/// Number of seeded random points the derivative check samples.
pub const DERIVATIVE_POINTS: usize = 20;

/// Base step of the central-difference oracle used by the check.
const DERIVATIVE_FD_STEP: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown problem \"{0}\" (expected monkey, coercive, logistic, or quadratic)")]
    UnknownProblem(String),
    #[error("unknown algorithm \"{0}\" (expected gd, arc, tr, or ahom)")]
    UnknownAlgorithm(String),
    #[error("algorithm \"{0}\" is listed more than once")]
    DuplicateAlgorithm(String),
    #[error("an experiment needs at least one algorithm")]
    NoAlgorithms,
    #[error("the logistic problem needs a dataset_path or a synthetic spec")]
    LogisticNeedsData,
    #[error("failed to load dataset {path}: {source}")]
    Dataset {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("explicit init has {got} coordinates but the problem has dimension {expected}")]
    InitDimension { expected: usize, got: usize },
    #[error("explicit init contains a non-finite coordinate")]
    InitNotFinite,
    #[error(transparent)]
    AhomConfig(#[from] crate::ahom::ConfigError),
    #[error(transparent)]
    BaselineConfig(#[from] crate::baselines::ConfigError),
    #[error("failed to parse config: {0}")]
    Config(#[from] serde_json::Error),
    #[error("failed to read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("trace line {line}: {message}")]
    TraceParse { line: usize, message: String },
}

/// Which objective to build.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub name: String,
    #[serde(default)]
    pub dataset_path: Option<PathBuf>,
    /// Ridge weight of the logistic objective.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub synthetic: Option<SyntheticSpec>,
    /// Dimension of the quadratic bowl (defaults to 2).
    #[serde(default)]
    pub dim: Option<usize>,
}

fn default_alpha() -> f64 {
    1e-5
}

/// Parameters of a generated classification dataset.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub d: usize,
    pub seed: u64,
}

/// Where a run starts. Absent from the config, the problem's own default
/// starting point is used.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSpec {
    Explicit(Vec<f64>),
    Zero,
    /// Standard normal coordinates scaled by `scale`, drawn from the
    /// experiment seed.
    Random { scale: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps1: 1e-6,
            eps2: 1e-6,
            eps3: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub max_iters: usize,
    pub max_time_s: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_iters: 5000,
            max_time_s: 600.0,
        }
    }
}

/// One experiment: a problem, the algorithms to race on it, and the
/// shared numeric settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub init: Option<InitSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default = "default_mode")]
    pub subsolver_mode: SubsolverMode,
    #[serde(default)]
    pub seed: u64,
}

fn default_mode() -> SubsolverMode {
    SubsolverMode::Krylov
}

const KNOWN_ALGORITHMS: [&str; 4] = ["gd", "arc", "tr", "ahom"];

impl ExperimentConfig {
    /// Structural checks that need no oracle: the algorithm list is
    /// nonempty, known, and free of duplicates.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.algorithms.is_empty() {
            return Err(HarnessError::NoAlgorithms);
        }
        for (i, name) in self.algorithms.iter().enumerate() {
            if !KNOWN_ALGORITHMS.contains(&name.as_str()) {
                return Err(HarnessError::UnknownAlgorithm(name.clone()));
            }
            if self.algorithms[..i].contains(name) {
                return Err(HarnessError::DuplicateAlgorithm(name.clone()));
            }
        }
        Ok(())
    }

    /// Parses a JSON config file.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Builds the oracle a spec names. The logistic objective loads its
/// dataset here; everything else is closed-form.
pub fn build_problem(spec: &ProblemSpec) -> Result<Box<dyn ObjectiveOracle>, HarnessError> {
    match spec.name.as_str() {
        "monkey" => Ok(Box::new(make_monkey())),
        "coercive" => Ok(Box::new(make_coercive())),
        "quadratic" => Ok(Box::new(make_quadratic(spec.dim.unwrap_or(2)))),
        "logistic" => {
            let dataset = if let Some(path) = &spec.dataset_path {
                load_libsvm_file(path, None).map_err(|source| HarnessError::Dataset {
                    path: path.clone(),
                    source,
                })?
            } else if let Some(synth) = &spec.synthetic {
                synthetic_dataset(synth.m, synth.d, synth.seed)
            } else {
                return Err(HarnessError::LogisticNeedsData);
            };
            let labels = map_labels(&dataset.raw_labels).map_err(|source| match &spec
                .dataset_path
            {
                Some(path) => HarnessError::Dataset {
                    path: path.clone(),
                    source,
                },
                None => HarnessError::Dataset {
                    path: PathBuf::from(dataset.source.clone()),
                    source,
                },
            })?;
            Ok(Box::new(make_logistic(
                &dataset.features,
                &labels,
                spec.alpha,
            )?))
        }
        other => Err(HarnessError::UnknownProblem(other.to_string())),
    }
}

/// Resolves the starting point for a run.
pub fn initial_point(
    config: &ExperimentConfig,
    meta: &ProblemMeta,
) -> Result<DVector<f64>, HarnessError> {
    match &config.init {
        None => Ok(meta.default_init.clone()),
        Some(InitSpec::Zero) => Ok(DVector::zeros(meta.dim)),
        Some(InitSpec::Explicit(coords)) => {
            if coords.len() != meta.dim {
                return Err(HarnessError::InitDimension {
                    expected: meta.dim,
                    got: coords.len(),
                });
            }
            if coords.iter().any(|v| !v.is_finite()) {
                return Err(HarnessError::InitNotFinite);
            }
            Ok(DVector::from_column_slice(coords))
        }
        Some(InitSpec::Random { scale }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            Ok(DVector::from_fn(meta.dim, |_, _| {
                scale * rng.sample::<f64, _>(StandardNormal)
            }))
        }
    }
}

/// One unified trace row. Columns an algorithm does not produce are
/// `None` and serialize as empty CSV fields.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub iter: usize,
    pub wall_time_s: f64,
    pub f: f64,
    pub chi1: f64,
    pub chi2: Option<f64>,
    pub chi3: Option<f64>,
    pub sigma: Option<f64>,
    pub kappa: Option<f64>,
    pub rho: Option<f64>,
    pub phi: Option<f64>,
    pub delta: Option<f64>,
    pub step_kind: Option<StepKind>,
    pub step_norm: f64,
}

impl From<&IterationRecord> for TraceRow {
    fn from(r: &IterationRecord) -> Self {
        TraceRow {
            iter: r.iter,
            wall_time_s: r.wall_time_s,
            f: r.f,
            chi1: r.chi1,
            chi2: Some(r.chi2),
            chi3: Some(r.chi3),
            sigma: Some(r.sigma),
            kappa: Some(r.kappa),
            rho: Some(r.rho),
            phi: r.phi,
            delta: r.delta,
            step_kind: Some(r.step_kind),
            step_norm: r.step_norm,
        }
    }
}

impl From<&BaselineRecord> for TraceRow {
    fn from(r: &BaselineRecord) -> Self {
        TraceRow {
            iter: r.iter,
            wall_time_s: r.wall_time_s,
            f: r.f,
            chi1: r.chi1,
            chi2: r.chi2,
            chi3: None,
            sigma: r.sigma,
            kappa: None,
            rho: r.rho,
            phi: None,
            delta: None,
            step_kind: r.step_kind,
            step_norm: r.step_norm,
        }
    }
}

/// Shortest round-trip float formatting; NaN and infinities print as
/// `NaN`, `inf`, `-inf`, all of which `f64::from_str` accepts back.
fn float_cell(v: f64) -> String {
    format!("{v:?}")
}

fn optional_cell(v: Option<f64>) -> String {
    v.map(float_cell).unwrap_or_default()
}

impl TraceRow {
    fn to_csv(&self) -> String {
        let mut line = String::new();
        write!(
            line,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.iter,
            float_cell(self.wall_time_s),
            float_cell(self.f),
            float_cell(self.chi1),
            optional_cell(self.chi2),
            optional_cell(self.chi3),
            optional_cell(self.sigma),
            optional_cell(self.kappa),
            optional_cell(self.rho),
            optional_cell(self.phi),
            optional_cell(self.delta),
            self.step_kind.map(|k| k.as_str()).unwrap_or(""),
            float_cell(self.step_norm),
        )
        .expect("string write cannot fail");
        line
    }
}

fn parse_float(field: &str, line: usize, column: &str) -> Result<f64, HarnessError> {
    field.parse().map_err(|_| HarnessError::TraceParse {
        line,
        message: format!("column {column} holds unparsable float {field:?}"),
    })
}

fn parse_optional(field: &str, line: usize, column: &str) -> Result<Option<f64>, HarnessError> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_float(field, line, column).map(Some)
    }
}

fn parse_step_kind(field: &str, line: usize) -> Result<Option<StepKind>, HarnessError> {
    let kind = match field {
        "" => None,
        "sarp_success" => Some(StepKind::SarpSuccess),
        "sarp_fail" => Some(StepKind::SarpFail),
        "escape_success" => Some(StepKind::EscapeSuccess),
        "escape_fail" => Some(StepKind::EscapeFail),
        "escape_skipped" => Some(StepKind::EscapeSkipped),
        other => {
            return Err(HarnessError::TraceParse {
                line,
                message: format!("unknown step kind {other:?}"),
            })
        }
    };
    Ok(kind)
}

/// Reads a trace file back, losslessly.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>, HarnessError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRACE_HEADER => {}
        Some((_, header)) => {
            return Err(HarnessError::TraceParse {
                line: 1,
                message: format!("bad header {header:?}"),
            })
        }
        None => {
            return Err(HarnessError::TraceParse {
                line: 1,
                message: "empty trace".to_string(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 13 {
            return Err(HarnessError::TraceParse {
                line,
                message: format!("expected 13 fields, found {}", fields.len()),
            });
        }
        rows.push(TraceRow {
            iter: fields[0].parse().map_err(|_| HarnessError::TraceParse {
                line,
                message: format!("bad iteration index {:?}", fields[0]),
            })?,
            wall_time_s: parse_float(fields[1], line, "wall_time_s")?,
            f: parse_float(fields[2], line, "f")?,
            chi1: parse_float(fields[3], line, "chi1")?,
            chi2: parse_optional(fields[4], line, "chi2")?,
            chi3: parse_optional(fields[5], line, "chi3")?,
            sigma: parse_optional(fields[6], line, "sigma")?,
            kappa: parse_optional(fields[7], line, "kappa")?,
            rho: parse_optional(fields[8], line, "rho")?,
            phi: parse_optional(fields[9], line, "phi")?,
            delta: parse_optional(fields[10], line, "delta")?,
            step_kind: parse_step_kind(fields[11], line)?,
            step_norm: parse_float(fields[12], line, "step_norm")?,
        });
    }
    Ok(rows)
}

fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<(), HarnessError> {
    let mut text = String::with_capacity(64 * (rows.len() + 1));
    text.push_str(TRACE_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Summary row for one algorithm: final value plus the measures a fresh
/// inspection of the final point reports.
#[derive(Debug, Clone, Serialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub status: RunStatus,
    pub iterations: usize,
    pub f: f64,
    /// ‖∇f‖ at the final point (= χ1).
    pub grad_norm: f64,
    /// Smallest Hessian eigenvalue at the final point (signed).
    pub lambda_min: f64,
    /// ‖Proj_S ∇³f‖_F at the final point (= χ3 for the subspace found
    /// there).
    pub tensor_norm: f64,
}

fn status_str(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Converged => "converged",
        RunStatus::BudgetExhausted => "budget_exhausted",
    }
}

impl AlgorithmSummary {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.algorithm,
            status_str(self.status),
            self.iterations,
            float_cell(self.f),
            float_cell(self.grad_norm),
            float_cell(self.lambda_min),
            float_cell(self.tensor_norm),
        )
    }
}

/// Everything `run_experiment` produced, for callers that want to inspect
/// results without re-reading the files.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub summaries: Vec<AlgorithmSummary>,
    pub trace_paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
}

fn baseline_config(config: &ExperimentConfig) -> BaselineConfig {
    BaselineConfig {
        eps1: config.tolerances.eps1,
        eps2: config.tolerances.eps2,
        max_iters: config.budget.max_iters,
        max_time_s: config.budget.max_time_s,
        ..BaselineConfig::default()
    }
}

/// The driver configuration an experiment config induces: default
/// constants plus the experiment's mode, tolerances, budget, and seed.
pub fn ahom_config_for(config: &ExperimentConfig) -> AhomConfig {
    AhomConfig {
        subsolver_mode: config.subsolver_mode,
        eps1: config.tolerances.eps1,
        eps2: config.tolerances.eps2,
        eps3: config.tolerances.eps3,
        max_iters: config.budget.max_iters,
        max_time_s: config.budget.max_time_s,
        seed: config.seed,
        ..AhomConfig::default()
    }
}

struct FinishedRun {
    rows: Vec<TraceRow>,
    x: DVector<f64>,
    f: f64,
    status: RunStatus,
    /// κ the measures at the final point should be taken with; `None`
    /// means the run never tracked one and the default κ0 applies.
    final_kappa: Option<f64>,
}

fn baseline_rows(result: &BaselineResult) -> Vec<TraceRow> {
    result.trace.iter().map(TraceRow::from).collect()
}

fn run_algorithm<O: ObjectiveOracle + ?Sized>(
    name: &str,
    oracle: &O,
    x0: &DVector<f64>,
    config: &ExperimentConfig,
) -> Result<FinishedRun, HarnessError> {
    match name {
        "gd" => {
            let out = gd_run(oracle, x0, &baseline_config(config))?;
            Ok(FinishedRun {
                rows: baseline_rows(&out),
                x: out.x,
                f: out.f,
                status: out.status,
                final_kappa: None,
            })
        }
        "arc" => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let out = arc_run(
                oracle,
                x0,
                &baseline_config(config),
                config.subsolver_mode,
                &mut rng,
            )?;
            Ok(FinishedRun {
                rows: baseline_rows(&out),
                x: out.x,
                f: out.f,
                status: out.status,
                final_kappa: None,
            })
        }
        "tr" => {
            let out = tr_run(oracle, x0, &baseline_config(config))?;
            Ok(FinishedRun {
                rows: baseline_rows(&out),
                x: out.x,
                f: out.f,
                status: out.status,
                final_kappa: None,
            })
        }
        "ahom" => {
            let out = ahom_run(oracle, x0, &ahom_config_for(config))?;
            Ok(FinishedRun {
                rows: out.trace.iter().map(TraceRow::from).collect(),
                x: out.x,
                f: out.f,
                status: out.status,
                final_kappa: Some(out.final_kappa),
            })
        }
        other => Err(HarnessError::UnknownAlgorithm(other.to_string())),
    }
}

/// Final-point summary. Baselines are measured with the default (β, κ0)
/// lens — the measures an AHOM run would open with at that point.
fn summarize<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    name: &str,
    run: &FinishedRun,
) -> AlgorithmSummary {
    let defaults = AhomConfig::default();
    let kappa = run.final_kappa.unwrap_or(defaults.kappa0);
    let measures = critical_measures(oracle, &run.x, defaults.beta, kappa);
    AlgorithmSummary {
        algorithm: name.to_string(),
        status: run.status,
        iterations: run.rows.len(),
        f: run.f,
        grad_norm: measures.chi1,
        lambda_min: linalg::min_eigenvalue(&oracle.hessian(&run.x)),
        tensor_norm: measures.chi3,
    }
}

/// Runs every algorithm in the config and writes `<algorithm>_trace.csv`
/// per algorithm plus `summary.csv` into `out_dir`.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentOutcome, HarnessError> {
    config.validate()?;
    let oracle = build_problem(&config.problem)?;
    let x0 = initial_point(config, oracle.meta())?;
    fs::create_dir_all(out_dir)?;

    let mut summaries = Vec::new();
    let mut trace_paths = Vec::new();
    for name in &config.algorithms {
        let run = run_algorithm(name.as_str(), oracle.as_ref(), &x0, config)?;
        let path = out_dir.join(format!("{name}_trace.csv"));
        write_trace(&path, &run.rows)?;
        summaries.push(summarize(oracle.as_ref(), name, &run));
        trace_paths.push(path);
    }

    let summary_path = out_dir.join("summary.csv");
    let mut text = String::new();
    text.push_str(SUMMARY_HEADER);
    text.push('\n');
    for s in &summaries {
        text.push_str(&s.to_csv());
        text.push('\n');
    }
    fs::write(&summary_path, text)?;

    Ok(ExperimentOutcome {
        summaries,
        trace_paths,
        summary_path,
    })
}

/// Max relative derivative errors over the seeded sample points, one per
/// order. Relative means ‖analytic − fd‖ / max(1, ‖analytic‖), so the
/// measure degrades gracefully to absolute error on vanishing
/// derivatives.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivativeReport {
    pub gradient: f64,
    pub hessian: f64,
    pub third: f64,
}

impl DerivativeReport {
    pub fn max_error(&self) -> f64 {
        self.gradient.max(self.hessian).max(self.third)
    }

    pub fn within_tolerance(&self) -> bool {
        self.max_error() <= DERIVATIVE_TOLERANCE
    }
}

fn relative(diff: f64, reference: f64) -> f64 {
    diff / reference.max(1.0)
}

/// Cross-checks the oracle's analytic derivatives against central
/// differences at `DERIVATIVE_POINTS` seeded standard-normal points.
pub fn check_derivatives<O: ObjectiveOracle + ?Sized>(oracle: &O, seed: u64) -> DerivativeReport {
    let fd = FiniteDifference::new(oracle, DERIVATIVE_FD_STEP);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = oracle.dim();
    let mut report = DerivativeReport {
        gradient: 0.0,
        hessian: 0.0,
        third: 0.0,
    };
    for _ in 0..DERIVATIVE_POINTS {
        let x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let g = oracle.gradient(&x);
        let h = oracle.hessian(&x);
        let t = oracle.third(&x);
        report.gradient = report
            .gradient
            .max(relative((&fd.gradient(&x) - &g).norm(), g.norm()));
        report.hessian = report
            .hessian
            .max(relative((fd.hessian(&x) - &h).norm(), h.norm()));
        let mut t_diff = fd.third(&x);
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    t_diff.set_sym(i, j, k, t_diff.get(i, j, k) - t.get(i, j, k));
                }
            }
        }
        report.third = report
            .third
            .max(relative(t_diff.frobenius_norm(), t.frobenius_norm()));
    }
    report
}
