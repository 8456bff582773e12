//! C ABI over `eagle_tune`.
//!
//! Every fallible call returns an [`EtStatus`]; on failure a description is
//! available from [`et_last_error_message`] on the same thread. Objects cross
//! the boundary as opaque pointers and must be released with their `_free`
//! function. Panics are caught and reported as `ET_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use eagle_tune::harness::{build_objective, run_experiment, run_optimizer, HarnessError, RunConfig};
use eagle_tune::levy::levy_density;
use eagle_tune::linalg::{solve_lyapunov, LyapunovError, Matrix2};
use eagle_tune::objective::{make_benchmark, Bounds, ObjectiveFunction};
use eagle_tune::optim::{
    eagle_strategy_run, plain_run, EagleConfig, FireflyParams, LocalSearch, PsoParams, RunResult, Termination,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotHurwitz = 3,
    Numerical = 4,
    Config = 5,
    Runtime = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtAlgorithm {
    EsPso = 0,
    EsFfa = 1,
    Pso = 2,
    Ffa = 3,
}

/// Opaque objective function.
pub struct EtObjective(ObjectiveFunction);

/// Opaque optimizer result.
pub struct EtResult(RunResult);

/// Opaque run configuration.
pub struct EtConfig(RunConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl ToString) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: EtStatus, msg: impl ToString) -> EtStatus {
    set_error(msg);
    status
}

fn harness_status(e: &HarnessError) -> EtStatus {
    match e {
        HarnessError::Parse(_) | HarnessError::Validation { .. } => EtStatus::Config,
        HarnessError::Objective(_) | HarnessError::Optim(_) => EtStatus::Runtime,
        HarnessError::Io { .. } => EtStatus::Io,
    }
}

fn guard<F: FnOnce() -> EtStatus>(f: F) -> EtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(EtStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, EtStatus> {
    if s.is_null() {
        return Err(fail(EtStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(EtStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn et_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Solves `AᵀP + PA = −Q` for a Hurwitz 2×2 `a` and symmetric `q`, both
/// row-major. Writes `(p11, p12, p22)` to `p_out`.
///
/// # Safety
/// `a` and `q` must point to 4 readable doubles, `p_out` to 3 writable ones.
#[no_mangle]
pub unsafe extern "C" fn et_solve_lyapunov(a: *const f64, q: *const f64, p_out: *mut f64) -> EtStatus {
    guard(|| {
        if a.is_null() || q.is_null() || p_out.is_null() {
            return fail(EtStatus::NullPointer, "null matrix pointer");
        }
        let a = std::slice::from_raw_parts(a, 4);
        let q = std::slice::from_raw_parts(q, 4);
        let a = Matrix2::new(a[0], a[1], a[2], a[3]);
        let q = Matrix2::new(q[0], q[1], q[2], q[3]);
        match solve_lyapunov(&a, &q) {
            Ok(p) => {
                let out = std::slice::from_raw_parts_mut(p_out, 3);
                out.copy_from_slice(&[p.p11, p.p12, p.p22]);
                EtStatus::Ok
            }
            Err(e @ LyapunovError::NotHurwitz { .. }) => fail(EtStatus::NotHurwitz, e),
            Err(e @ LyapunovError::NonFinite) => fail(EtStatus::InvalidArgument, e),
            Err(e) => fail(EtStatus::Numerical, e),
        }
    })
}

/// Lévy flight density at `step > 0` for `1 < lambda < 2`.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn et_levy_density(step: f64, lambda: f64, out: *mut f64) -> EtStatus {
    guard(|| {
        if out.is_null() {
            return fail(EtStatus::NullPointer, "out is null");
        }
        match levy_density(step, lambda) {
            Ok(v) => {
                *out = v;
                EtStatus::Ok
            }
            Err(e) => fail(EtStatus::InvalidArgument, e),
        }
    })
}

/// Creates a benchmark objective (`"sphere"`, `"rosenbrock"`, `"rastrigin"`)
/// on the box `[lower, upper]^dim`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_objective_benchmark_new(
    name: *const c_char,
    dim: usize,
    lower: f64,
    upper: f64,
    out: *mut *mut EtObjective,
) -> EtStatus {
    guard(|| {
        if out.is_null() {
            return fail(EtStatus::NullPointer, "out is null");
        }
        let name = match str_arg(name, "name") {
            Ok(n) => n,
            Err(s) => return s,
        };
        let made = Bounds::uniform(dim, lower, upper).and_then(|b| make_benchmark(name, dim, b));
        match made {
            Ok(f) => {
                *out = Box::into_raw(Box::new(EtObjective(f)));
                EtStatus::Ok
            }
            Err(e) => fail(EtStatus::InvalidArgument, e),
        }
    })
}

/// Creates the objective selected by a configuration (benchmark or BLDC
/// tracking).
///
/// # Safety
/// `config` must come from [`et_config_parse`] or [`et_config_load`]; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_objective_from_config(config: *const EtConfig, out: *mut *mut EtObjective) -> EtStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            return fail(EtStatus::NullPointer, "null argument");
        }
        match build_objective(&(*config).0) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(EtObjective(f)));
                EtStatus::Ok
            }
            Err(e) => fail(harness_status(&e), e),
        }
    })
}

/// Dimension of the objective's search box.
///
/// # Safety
/// `objective` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn et_objective_dimension(objective: *const EtObjective) -> usize {
    objective.as_ref().map_or(0, |o| o.0.dimension())
}

/// Evaluates the objective at `x[0..len]`.
///
/// # Safety
/// `objective` must be a live handle, `x` must point to `len` doubles, `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_objective_evaluate(
    objective: *const EtObjective,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> EtStatus {
    guard(|| {
        if objective.is_null() || x.is_null() || out.is_null() {
            return fail(EtStatus::NullPointer, "null argument");
        }
        let f = &(*objective).0;
        if len != f.dimension() {
            return fail(EtStatus::InvalidArgument, format!("expected {} coordinates, got {len}", f.dimension()));
        }
        *out = f.evaluate(std::slice::from_raw_parts(x, len));
        EtStatus::Ok
    })
}

/// # Safety
/// `objective` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn et_objective_free(objective: *mut EtObjective) {
    if !objective.is_null() {
        drop(Box::from_raw(objective));
    }
}

/// Minimizes `objective` with default algorithm parameters (30 agents, 20
/// iterations). `eval_budget = 0` selects the default of 600 evaluations.
///
/// # Safety
/// `objective` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_run(
    objective: *const EtObjective,
    algorithm: EtAlgorithm,
    seed: u64,
    eval_budget: u64,
    out: *mut *mut EtResult,
) -> EtStatus {
    guard(|| {
        if objective.is_null() || out.is_null() {
            return fail(EtStatus::NullPointer, "null argument");
        }
        let f = &(*objective).0;
        let local = match algorithm {
            EtAlgorithm::EsPso | EtAlgorithm::Pso => LocalSearch::Pso(PsoParams::default()),
            EtAlgorithm::EsFfa | EtAlgorithm::Ffa => LocalSearch::Firefly(FireflyParams::default()),
        };
        let budget = if eval_budget == 0 { local.default_budget() } else { eval_budget };
        let result = match algorithm {
            EtAlgorithm::EsPso | EtAlgorithm::EsFfa => {
                let config = EagleConfig { eval_budget: budget, ..EagleConfig::new(local, seed) };
                eagle_strategy_run(f, &config)
            }
            EtAlgorithm::Pso | EtAlgorithm::Ffa => plain_run(&local, f, budget, seed),
        };
        match result {
            Ok(r) => {
                *out = Box::into_raw(Box::new(EtResult(r)));
                EtStatus::Ok
            }
            Err(e) => fail(EtStatus::InvalidArgument, e),
        }
    })
}

/// Number of coordinates in the result's best position.
///
/// # Safety
/// `result` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn et_result_dimension(result: *const EtResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.best_position.len())
}

/// Copies the best position into `position[0..len]` and the best value,
/// evaluations used and whether the run stopped on the tolerance rule into
/// the remaining outputs. Any output pointer may be null to skip it.
///
/// # Safety
/// `result` must be a live handle; non-null outputs must be writable, with
/// `position` holding `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn et_result_best(
    result: *const EtResult,
    position: *mut f64,
    len: usize,
    value: *mut f64,
    evaluations: *mut u64,
    stopped_on_tolerance: *mut bool,
) -> EtStatus {
    guard(|| {
        let Some(r) = result.as_ref().map(|r| &r.0) else {
            return fail(EtStatus::NullPointer, "result is null");
        };
        if !position.is_null() {
            if len != r.best_position.len() {
                return fail(
                    EtStatus::InvalidArgument,
                    format!("position buffer holds {len}, result has {}", r.best_position.len()),
                );
            }
            std::slice::from_raw_parts_mut(position, len).copy_from_slice(&r.best_position);
        }
        if !value.is_null() {
            *value = r.best_value;
        }
        if !evaluations.is_null() {
            *evaluations = r.evaluations_used;
        }
        if !stopped_on_tolerance.is_null() {
            *stopped_on_tolerance = r.terminated_by == Termination::Tolerance;
        }
        EtStatus::Ok
    })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn et_result_free(result: *mut EtResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Parses and validates TOML configuration text.
///
/// # Safety
/// `toml_text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_config_parse(toml_text: *const c_char, out: *mut *mut EtConfig) -> EtStatus {
    guard(|| {
        if out.is_null() {
            return fail(EtStatus::NullPointer, "out is null");
        }
        let text = match str_arg(toml_text, "toml_text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match RunConfig::parse(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(EtConfig(c)));
                EtStatus::Ok
            }
            Err(e) => fail(harness_status(&e), e),
        }
    })
}

/// Reads and validates a TOML configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn et_config_load(path: *const c_char, out: *mut *mut EtConfig) -> EtStatus {
    guard(|| {
        if out.is_null() {
            return fail(EtStatus::NullPointer, "out is null");
        }
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match eagle_tune::harness::load_config(Path::new(path)) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(EtConfig(c)));
                EtStatus::Ok
            }
            Err(e) => fail(harness_status(&e), e),
        }
    })
}

/// Overrides the configured seed.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn et_config_set_seed(config: *mut EtConfig, seed: u64) -> EtStatus {
    match config.as_mut() {
        Some(c) => {
            c.0.experiment.seed = seed;
            EtStatus::Ok
        }
        None => fail(EtStatus::NullPointer, "config is null"),
    }
}

/// Runs the configured experiment. With a non-null `out_dir` the CSV/JSON
/// outputs are written there; with null nothing touches the filesystem.
///
/// # Safety
/// `config` must be a live handle, `out_dir` null or a NUL-terminated string,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn et_config_run(
    config: *const EtConfig,
    out_dir: *const c_char,
    out: *mut *mut EtResult,
) -> EtStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            return fail(EtStatus::NullPointer, "null argument");
        }
        let config = &(*config).0;
        let result = if out_dir.is_null() {
            run_optimizer(config)
        } else {
            let dir = match str_arg(out_dir, "out_dir") {
                Ok(d) => d,
                Err(s) => return s,
            };
            run_experiment(config, Path::new(dir)).map(|s| RunResult {
                best_position: s.best_position,
                best_value: s.best_value,
                evaluations_used: s.evaluations_used,
                history: Vec::new(),
                terminated_by: s.terminated_by,
            })
        };
        match result {
            Ok(r) => {
                *out = Box::into_raw(Box::new(EtResult(r)));
                EtStatus::Ok
            }
            Err(e) => fail(harness_status(&e), e),
        }
    })
}

/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn et_config_free(config: *mut EtConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}
