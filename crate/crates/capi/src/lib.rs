//! C ABI for the adaptive high-order optimizer.
//!
//! The surface is the usual opaque-handle pattern: constructors return
//! owned pointers the caller must release with the matching `*_free`,
//! accessors borrow, and every fallible call reports an [`AhomStatus`]
//! code instead of unwinding. `include/ahom.h` is regenerated from these
//! declarations by the build script.
//!
//! All functions tolerate null handles — they return
//! `AHOM_STATUS_NULL_ARGUMENT` or an inert value rather than crash — so a
//! binding error in a host language surfaces as a checkable code.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use ahom::data_ingest::{load_libsvm_file, map_labels, synthetic_dataset};
use ahom::problems::{make_coercive, make_logistic, make_monkey, make_quadratic};
use ahom::{
    ahom_run, arc_run, gd_run, tr_run, AhomConfig, BaselineConfig, ObjectiveOracle, RunStatus,
    SubsolverMode,
};
use nalgebra::DVector;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome code of a C-API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhomStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A scalar argument was out of range (zero dimension, bad tolerance,
    /// negative regularization, …).
    InvalidArgument = 2,
    /// A path was not valid UTF-8.
    BadUtf8 = 3,
    /// A dataset file could not be read or parsed.
    DatasetUnreadable = 4,
    /// A buffer length did not match the problem dimension.
    DimensionMismatch = 5,
    /// A point contained NaN or infinite coordinates.
    NonFiniteInput = 6,
    /// The solver panicked; the handle is untouched.
    InternalError = 7,
}

/// Which optimizer [`ahom_solve`] runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhomAlgorithm {
    /// Armijo backtracking gradient descent.
    GradientDescent = 0,
    /// Adaptive cubic-regularized Newton.
    Arc = 1,
    /// Trust-region Newton with a truncated-CG subproblem.
    TrustRegion = 2,
    /// The third-order method: cubic-regularized steps plus tensor escapes.
    HighOrder = 3,
}

/// How the cubic-regularized subproblem is minimized.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhomMode {
    /// Eigendecomposition-based global minimizer.
    Exact = 0,
    /// Lanczos subspace minimizer (the default).
    Krylov = 1,
}

/// Terminal state of a finished run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhomRunStatus {
    /// Every criticality tolerance was met.
    Converged = 0,
    /// The iteration or wall-time budget ran out first.
    BudgetExhausted = 1,
}

/// Solver options shared by all four algorithms. Obtain defaults from
/// [`ahom_options_default`] and override fields as needed; tolerances the
/// second-order baselines do not use (`eps3`) are ignored by them.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AhomOptions {
    /// Subproblem solver for the cubic-regularized algorithms.
    pub mode: AhomMode,
    /// Gradient-norm tolerance.
    pub eps1: f64,
    /// Negative-curvature tolerance.
    pub eps2: f64,
    /// Projected third-derivative tolerance (high-order method only).
    pub eps3: f64,
    /// Iteration budget.
    pub max_iters: u64,
    /// Wall-clock budget in seconds.
    pub max_time_s: f64,
    /// Seed for the run's private generator.
    pub seed: u64,
}

/// An objective the solvers can run on. Opaque; create with one of the
/// `ahom_problem_*` constructors and release with [`ahom_problem_free`].
pub struct AhomProblem {
    oracle: Box<dyn ObjectiveOracle>,
}

/// A finished optimization run. Opaque; produced by [`ahom_solve`] and
/// released with [`ahom_run_free`].
pub struct AhomRun {
    x: Vec<f64>,
    f: f64,
    status: AhomRunStatus,
    iterations: usize,
}

/// Default options: Krylov mode, 1e-6 tolerances, 5000 iterations, 600 s,
/// seed 0.
#[no_mangle]
pub extern "C" fn ahom_options_default() -> AhomOptions {
    let reference = AhomConfig::default();
    AhomOptions {
        mode: AhomMode::Krylov,
        eps1: reference.eps1,
        eps2: reference.eps2,
        eps3: reference.eps3,
        max_iters: reference.max_iters as u64,
        max_time_s: reference.max_time_s,
        seed: reference.seed,
    }
}

/// Static description of a status code. Never null; do not free.
#[no_mangle]
pub extern "C" fn ahom_status_message(status: AhomStatus) -> *const c_char {
    let message: &'static CStr = match status {
        AhomStatus::Ok => c"ok",
        AhomStatus::NullArgument => c"a required pointer argument was null",
        AhomStatus::InvalidArgument => c"an argument was out of range",
        AhomStatus::BadUtf8 => c"a path was not valid UTF-8",
        AhomStatus::DatasetUnreadable => c"the dataset could not be read or parsed",
        AhomStatus::DimensionMismatch => c"a buffer length did not match the problem dimension",
        AhomStatus::NonFiniteInput => c"a point contained NaN or infinite coordinates",
        AhomStatus::InternalError => c"the solver panicked",
    };
    message.as_ptr()
}

fn boxed_problem(oracle: impl ObjectiveOracle + 'static) -> *mut AhomProblem {
    Box::into_raw(Box::new(AhomProblem {
        oracle: Box::new(oracle),
    }))
}

/// The two-dimensional monkey saddle, a cubic whose origin defeats
/// second-order methods. Caller owns the returned handle.
#[no_mangle]
pub extern "C" fn ahom_problem_monkey() -> *mut AhomProblem {
    boxed_problem(make_monkey())
}

/// The two-dimensional quartic well whose basin ends in a degenerate
/// critical point. Caller owns the returned handle.
#[no_mangle]
pub extern "C" fn ahom_problem_coercive() -> *mut AhomProblem {
    boxed_problem(make_coercive())
}

/// The `dim`-dimensional quadratic bowl. Returns null when `dim` is zero.
#[no_mangle]
pub extern "C" fn ahom_problem_quadratic(dim: usize) -> *mut AhomProblem {
    if dim == 0 {
        return std::ptr::null_mut();
    }
    boxed_problem(make_quadratic(dim))
}

/// Ridge-regularized logistic regression on a synthetic two-class dataset
/// of `samples` rows and `features` columns drawn from `seed`. On success
/// writes a caller-owned handle to `out`.
#[no_mangle]
pub extern "C" fn ahom_problem_logistic_synthetic(
    samples: usize,
    features: usize,
    seed: u64,
    alpha: f64,
    out: *mut *mut AhomProblem,
) -> AhomStatus {
    if out.is_null() {
        return AhomStatus::NullArgument;
    }
    if samples == 0 || features == 0 {
        return AhomStatus::InvalidArgument;
    }
    let data = synthetic_dataset(samples, features, seed);
    let labels = match map_labels(&data.raw_labels) {
        Ok(labels) => labels,
        Err(_) => return AhomStatus::DatasetUnreadable,
    };
    match make_logistic(&data.features, &labels, alpha) {
        Ok(problem) => {
            // Safety: out was checked non-null; the caller promises it
            // points at writable storage for one pointer.
            unsafe { *out = boxed_problem(problem) };
            AhomStatus::Ok
        }
        Err(_) => AhomStatus::InvalidArgument,
    }
}

/// Ridge-regularized logistic regression on a LIBSVM-format file. On
/// success writes a caller-owned handle to `out`.
#[no_mangle]
pub extern "C" fn ahom_problem_logistic_file(
    path: *const c_char,
    alpha: f64,
    out: *mut *mut AhomProblem,
) -> AhomStatus {
    if path.is_null() || out.is_null() {
        return AhomStatus::NullArgument;
    }
    // Safety: path was checked non-null; the caller promises it points at
    // a NUL-terminated string that outlives this call.
    let raw = unsafe { CStr::from_ptr(path) };
    let Ok(path) = raw.to_str() else {
        return AhomStatus::BadUtf8;
    };
    let data = match load_libsvm_file(Path::new(path), None) {
        Ok(data) => data,
        Err(_) => return AhomStatus::DatasetUnreadable,
    };
    let labels = match map_labels(&data.raw_labels) {
        Ok(labels) => labels,
        Err(_) => return AhomStatus::DatasetUnreadable,
    };
    match make_logistic(&data.features, &labels, alpha) {
        Ok(problem) => {
            // Safety: out was checked non-null, as above.
            unsafe { *out = boxed_problem(problem) };
            AhomStatus::Ok
        }
        Err(_) => AhomStatus::InvalidArgument,
    }
}

/// Dimension of a problem's variable vector; 0 for a null handle.
#[no_mangle]
pub extern "C" fn ahom_problem_dim(problem: *const AhomProblem) -> usize {
    if problem.is_null() {
        return 0;
    }
    // Safety: problem was checked non-null and is only ever created by the
    // constructors above, so it points at a live AhomProblem.
    unsafe { (*problem).oracle.meta().dim }
}

/// Reads `dim` coordinates from `x` into a finite point, where `expected`
/// is the problem dimension.
fn checked_point(x: *const f64, dim: usize, expected: usize) -> Result<DVector<f64>, AhomStatus> {
    if x.is_null() {
        return Err(AhomStatus::NullArgument);
    }
    if dim != expected {
        return Err(AhomStatus::DimensionMismatch);
    }
    // Safety: x was checked non-null and the caller promises `dim`
    // readable doubles behind it.
    let coords = unsafe { std::slice::from_raw_parts(x, dim) };
    if coords.iter().any(|v| !v.is_finite()) {
        return Err(AhomStatus::NonFiniteInput);
    }
    Ok(DVector::from_column_slice(coords))
}

/// Objective value at `x` (length `dim`), written to `out_value`.
#[no_mangle]
pub extern "C" fn ahom_problem_value(
    problem: *const AhomProblem,
    x: *const f64,
    dim: usize,
    out_value: *mut f64,
) -> AhomStatus {
    if problem.is_null() || out_value.is_null() {
        return AhomStatus::NullArgument;
    }
    // Safety: problem was checked non-null; constructors are the only
    // source of these handles.
    let oracle = unsafe { (*problem).oracle.as_ref() };
    let point = match checked_point(x, dim, oracle.meta().dim) {
        Ok(point) => point,
        Err(status) => return status,
    };
    match catch_unwind(AssertUnwindSafe(|| oracle.value(&point))) {
        Ok(value) => {
            // Safety: out_value was checked non-null.
            unsafe { *out_value = value };
            AhomStatus::Ok
        }
        Err(_) => AhomStatus::InternalError,
    }
}

/// Gradient at `x`, written to `out_gradient` (both length `dim`).
#[no_mangle]
pub extern "C" fn ahom_problem_gradient(
    problem: *const AhomProblem,
    x: *const f64,
    dim: usize,
    out_gradient: *mut f64,
) -> AhomStatus {
    if problem.is_null() || out_gradient.is_null() {
        return AhomStatus::NullArgument;
    }
    // Safety: problem was checked non-null; constructors are the only
    // source of these handles.
    let oracle = unsafe { (*problem).oracle.as_ref() };
    let point = match checked_point(x, dim, oracle.meta().dim) {
        Ok(point) => point,
        Err(status) => return status,
    };
    match catch_unwind(AssertUnwindSafe(|| oracle.gradient(&point))) {
        Ok(gradient) => {
            // Safety: out_gradient was checked non-null and the caller
            // promises `dim` writable doubles behind it.
            unsafe {
                std::ptr::copy_nonoverlapping(gradient.as_slice().as_ptr(), out_gradient, dim);
            }
            AhomStatus::Ok
        }
        Err(_) => AhomStatus::InternalError,
    }
}

/// Releases a problem handle. Null is a harmless no-op.
#[no_mangle]
pub extern "C" fn ahom_problem_free(problem: *mut AhomProblem) {
    if problem.is_null() {
        return;
    }
    // Safety: the handle came from one of the constructors above and, per
    // the ownership contract, is released at most once.
    drop(unsafe { Box::from_raw(problem) });
}

fn mode_of(options: &AhomOptions) -> SubsolverMode {
    match options.mode {
        AhomMode::Exact => SubsolverMode::Exact,
        AhomMode::Krylov => SubsolverMode::Krylov,
    }
}

fn run_status(status: RunStatus) -> AhomRunStatus {
    match status {
        RunStatus::Converged => AhomRunStatus::Converged,
        RunStatus::BudgetExhausted => AhomRunStatus::BudgetExhausted,
    }
}

fn solve_inner(
    oracle: &dyn ObjectiveOracle,
    algorithm: AhomAlgorithm,
    x0: &DVector<f64>,
    options: &AhomOptions,
) -> Result<AhomRun, AhomStatus> {
    let max_iters = usize::try_from(options.max_iters).unwrap_or(usize::MAX);
    let run = match algorithm {
        AhomAlgorithm::HighOrder => {
            let config = AhomConfig {
                subsolver_mode: mode_of(options),
                eps1: options.eps1,
                eps2: options.eps2,
                eps3: options.eps3,
                max_iters,
                max_time_s: options.max_time_s,
                seed: options.seed,
                ..AhomConfig::default()
            };
            let out = ahom_run(oracle, x0, &config).map_err(|_| AhomStatus::InvalidArgument)?;
            AhomRun {
                x: out.x.as_slice().to_vec(),
                f: out.f,
                status: run_status(out.status),
                iterations: out.trace.len(),
            }
        }
        _ => {
            let config = BaselineConfig {
                eps1: options.eps1,
                eps2: options.eps2,
                max_iters,
                max_time_s: options.max_time_s,
                ..BaselineConfig::default()
            };
            let out = match algorithm {
                AhomAlgorithm::GradientDescent => gd_run(oracle, x0, &config),
                AhomAlgorithm::Arc => {
                    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                    arc_run(oracle, x0, &config, mode_of(options), &mut rng)
                }
                AhomAlgorithm::TrustRegion => tr_run(oracle, x0, &config),
                AhomAlgorithm::HighOrder => unreachable!("handled above"),
            }
            .map_err(|_| AhomStatus::InvalidArgument)?;
            AhomRun {
                x: out.x.as_slice().to_vec(),
                f: out.f,
                status: run_status(out.status),
                iterations: out.trace.len(),
            }
        }
    };
    Ok(run)
}

/// Runs an optimizer on a problem. `x0` may be null to start from the
/// problem's standard initial point; otherwise it must hold `x0_len`
/// finite coordinates matching the problem dimension. `options` may be
/// null for defaults. On success writes a caller-owned run handle to
/// `out`.
#[no_mangle]
pub extern "C" fn ahom_solve(
    problem: *const AhomProblem,
    algorithm: AhomAlgorithm,
    x0: *const f64,
    x0_len: usize,
    options: *const AhomOptions,
    out: *mut *mut AhomRun,
) -> AhomStatus {
    if problem.is_null() || out.is_null() {
        return AhomStatus::NullArgument;
    }
    // Safety: problem was checked non-null; constructors are the only
    // source of these handles.
    let oracle = unsafe { (*problem).oracle.as_ref() };
    let start = if x0.is_null() {
        oracle.meta().default_init.clone()
    } else {
        match checked_point(x0, x0_len, oracle.meta().dim) {
            Ok(point) => point,
            Err(status) => return status,
        }
    };
    let options = if options.is_null() {
        ahom_options_default()
    } else {
        // Safety: options was checked non-null and is a plain-data struct
        // the caller promises is initialized.
        unsafe { *options }
    };

    match catch_unwind(AssertUnwindSafe(|| {
        solve_inner(oracle, algorithm, &start, &options)
    })) {
        Ok(Ok(run)) => {
            // Safety: out was checked non-null.
            unsafe { *out = Box::into_raw(Box::new(run)) };
            AhomStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => AhomStatus::InternalError,
    }
}

/// Terminal status of a run; budget-exhausted for a null handle.
#[no_mangle]
pub extern "C" fn ahom_run_status(run: *const AhomRun) -> AhomRunStatus {
    if run.is_null() {
        return AhomRunStatus::BudgetExhausted;
    }
    // Safety: run was checked non-null; ahom_solve is the only source of
    // these handles.
    unsafe { (*run).status }
}

/// Final objective value; NaN for a null handle.
#[no_mangle]
pub extern "C" fn ahom_run_value(run: *const AhomRun) -> f64 {
    if run.is_null() {
        return f64::NAN;
    }
    // Safety: as in ahom_run_status.
    unsafe { (*run).f }
}

/// Number of recorded iterations; 0 for a null handle.
#[no_mangle]
pub extern "C" fn ahom_run_iterations(run: *const AhomRun) -> usize {
    if run.is_null() {
        return 0;
    }
    // Safety: as in ahom_run_status.
    unsafe { (*run).iterations }
}

/// Dimension of the run's final point; 0 for a null handle.
#[no_mangle]
pub extern "C" fn ahom_run_dim(run: *const AhomRun) -> usize {
    if run.is_null() {
        return 0;
    }
    // Safety: as in ahom_run_status.
    unsafe { (*run).x.len() }
}

/// Copies the final point into `out` (length `len`, which must equal the
/// run's dimension).
#[no_mangle]
pub extern "C" fn ahom_run_solution(
    run: *const AhomRun,
    out: *mut f64,
    len: usize,
) -> AhomStatus {
    if run.is_null() || out.is_null() {
        return AhomStatus::NullArgument;
    }
    // Safety: run was checked non-null, as in ahom_run_status.
    let x = unsafe { &(*run).x };
    if len != x.len() {
        return AhomStatus::DimensionMismatch;
    }
    // Safety: out was checked non-null and the caller promises `len`
    // writable doubles behind it.
    unsafe { std::ptr::copy_nonoverlapping(x.as_ptr(), out, len) };
    AhomStatus::Ok
}

/// Releases a run handle. Null is a harmless no-op.
#[no_mangle]
pub extern "C" fn ahom_run_free(run: *mut AhomRun) {
    if run.is_null() {
        return;
    }
    // Safety: the handle came from ahom_solve and, per the ownership
    // contract, is released at most once.
    drop(unsafe { Box::from_raw(run) });
}
