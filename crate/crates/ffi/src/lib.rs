//! C ABI over `dashsel`.
//!
//! Handles are opaque pointers created by `*_new`/`dash_run*` and released
//! with the matching `*_free`. Every fallible call returns a [`DashStatus`];
//! on failure [`dash_last_error`] describes the problem. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use dashsel::baselines::{greedy_parallel, greedy_sds_ma, random_k, top_k};
use dashsel::harness::load_csv;
use dashsel::objectives::{make_oracle, AOptParams, Dataset, ObjectiveKind, ObjectiveSource, Oracle};
use dashsel::solver::{self, dash_with_guessing, Guess, SelectionResult};
use dashsel::{Error, IndexSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DashStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    SizeError = 4,
    NumericError = 5,
    DomainError = 6,
    IoError = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DashObjective {
    Reg = 0,
    R2 = 1,
    Class = 2,
    Aopt = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DashBaseline {
    Greedy = 0,
    GreedyParallel = 1,
    TopK = 2,
    Random = 3,
}

/// Selector parameters. `alpha <= 0` and `opt < 0` select the guess grids;
/// `filter_cap = 0` selects the default cap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DashParams {
    pub k: usize,
    pub r: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub opt: f64,
    pub samples: usize,
    pub filter_cap: usize,
    pub seed: u64,
}

pub struct DashDataset {
    inner: Dataset,
}

pub struct DashOracle {
    inner: Oracle,
}

pub struct DashSelection {
    inner: SelectionResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> DashStatus {
    match e {
        Error::Config(_) => DashStatus::InvalidArgument,
        Error::Size(_) => DashStatus::SizeError,
        Error::Numeric(_) => DashStatus::NumericError,
        Error::Domain(_) => DashStatus::DomainError,
        Error::Io { .. } => DashStatus::IoError,
        _ => DashStatus::DataError,
    }
}

fn guard<F: FnOnce() -> Result<(), (DashStatus, String)>>(f: F) -> DashStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DashStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DashStatus::Panic
        }
    }
}

fn lift<T>(r: dashsel::Result<T>) -> Result<T, (DashStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (DashStatus, String) {
    (DashStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (DashStatus, String) {
    (DashStatus::InvalidArgument, msg.into())
}

unsafe fn path_arg<'a>(p: *const c_char, what: &str) -> Result<&'a Path, (DashStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))?;
    Ok(Path::new(s))
}

fn put<T>(out: *mut *mut T, value: T) {
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn dash_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a dataset from a row-major `d × n` feature array and an optional
/// length-`d` response (null for all zeros).
///
/// # Safety
/// `features` must point to `d * n` doubles, `response` to `d` doubles or be
/// null, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dash_dataset_new(
    features: *const f64,
    response: *const f64,
    d: usize,
    n: usize,
    out: *mut *mut DashDataset,
) -> DashStatus {
    guard(|| {
        if features.is_null() {
            return Err(null("features"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = d.checked_mul(n).ok_or_else(|| invalid("d * n overflows"))?;
        let x = std::slice::from_raw_parts(features, len);
        let y = if response.is_null() {
            vec![0.0; d]
        } else {
            std::slice::from_raw_parts(response, d).to_vec()
        };
        let data = lift(Dataset::from_rows(d, n, x, &y))?;
        put(out, DashDataset { inner: data });
        Ok(())
    })
}

/// Loads a dataset from CSV files; `response_path` may be null.
///
/// # Safety
/// Paths must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dash_dataset_load_csv(
    features_path: *const c_char,
    response_path: *const c_char,
    out: *mut *mut DashDataset,
) -> DashStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = path_arg(features_path, "features_path")?;
        let r = if response_path.is_null() {
            None
        } else {
            Some(path_arg(response_path, "response_path")?)
        };
        let (data, _) = lift(load_csv(f, r))?;
        put(out, DashDataset { inner: data });
        Ok(())
    })
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn dash_dataset_rows(ds: *const DashDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.rows())
}

/// Number of features, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn dash_dataset_cols(ds: *const DashDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.cols())
}

/// # Safety
/// `ds` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dash_dataset_free(ds: *mut DashDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Builds an objective oracle over a dataset. `beta` and `sigma` are used by
/// the A-optimality objective only. The dataset may be freed afterwards.
///
/// # Safety
/// `ds` must be a live dataset handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dash_oracle_new(
    ds: *const DashDataset,
    objective: DashObjective,
    beta: f64,
    sigma: f64,
    workers: usize,
    out: *mut *mut DashOracle,
) -> DashStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("dataset"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match objective {
            DashObjective::Reg => ObjectiveKind::Reg,
            DashObjective::R2 => ObjectiveKind::R2,
            DashObjective::Class => ObjectiveKind::Class,
            DashObjective::Aopt => ObjectiveKind::Aopt,
        };
        let aopt = match kind {
            ObjectiveKind::Aopt => Some(lift(AOptParams::new(beta, sigma))?),
            _ => None,
        };
        let source = ObjectiveSource::Data(ds.inner.clone());
        let oracle = lift(make_oracle(kind, &source, aopt, None).and_then(|o| o.with_workers(workers)))?;
        put(out, DashOracle { inner: oracle });
        Ok(())
    })
}

/// Evaluates the objective on the given indices (duplicates are merged).
///
/// # Safety
/// `indices` must point to `len` values (or be null with `len = 0`) and
/// `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dash_oracle_eval(
    oracle: *const DashOracle,
    indices: *const usize,
    len: usize,
    value: *mut f64,
) -> DashStatus {
    guard(|| {
        let o = oracle.as_ref().ok_or_else(|| null("oracle"))?;
        if value.is_null() {
            return Err(null("value"));
        }
        let idx: &[usize] = if len == 0 {
            &[]
        } else if indices.is_null() {
            return Err(null("indices"));
        } else {
            std::slice::from_raw_parts(indices, len)
        };
        let v = lift(o.inner.eval(&IndexSet::from_unsorted(idx.iter().copied())))?;
        *value = v;
        Ok(())
    })
}

/// # Safety
/// `oracle` must be null or a live oracle handle.
#[no_mangle]
pub unsafe extern "C" fn dash_oracle_ground_size(oracle: *const DashOracle) -> usize {
    oracle.as_ref().map_or(0, |o| o.inner.ground_size())
}

/// Queries issued so far through this handle.
///
/// # Safety
/// `oracle` must be null or a live oracle handle.
#[no_mangle]
pub unsafe extern "C" fn dash_oracle_queries(oracle: *const DashOracle) -> u64 {
    oracle.as_ref().map_or(0, |o| o.inner.queries())
}

/// # Safety
/// `oracle` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dash_oracle_free(oracle: *mut DashOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Defaults: `k = 10`, `r = 5`, `ε = 0.1`, guess grids on, 5 samples.
#[no_mangle]
pub extern "C" fn dash_params_default() -> DashParams {
    let p = solver::DashParams::default();
    DashParams {
        k: p.k,
        r: p.r,
        epsilon: p.epsilon,
        alpha: 0.0,
        opt: -1.0,
        samples: p.samples_m,
        filter_cap: 0,
        seed: p.seed,
    }
}

fn to_params(p: &DashParams) -> solver::DashParams {
    solver::DashParams {
        k: p.k,
        r: p.r,
        epsilon: p.epsilon,
        alpha: if p.alpha > 0.0 { Guess::Fixed(p.alpha) } else { Guess::Auto },
        opt_guess: if p.opt >= 0.0 { Guess::Fixed(p.opt) } else { Guess::Auto },
        samples_m: p.samples,
        filter_cap: (p.filter_cap > 0).then_some(p.filter_cap),
        seed: p.seed,
        ..Default::default()
    }
}

/// Runs the adaptive-sampling selector.
///
/// # Safety
/// `oracle` must be a live oracle handle, `params` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dash_run(
    oracle: *const DashOracle,
    params: *const DashParams,
    out: *mut *mut DashSelection,
) -> DashStatus {
    guard(|| {
        let o = oracle.as_ref().ok_or_else(|| null("oracle"))?;
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let res = lift(dash_with_guessing(&o.inner, &to_params(p)))?;
        put(out, DashSelection { inner: res });
        Ok(())
    })
}

/// Runs a baseline selector. `seed` is used by `Random`, `workers` by `GreedyParallel`.
///
/// # Safety
/// `oracle` must be a live oracle handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dash_run_baseline(
    oracle: *const DashOracle,
    baseline: DashBaseline,
    k: usize,
    seed: u64,
    workers: usize,
    out: *mut *mut DashSelection,
) -> DashStatus {
    guard(|| {
        let o = &oracle.as_ref().ok_or_else(|| null("oracle"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let res = lift(match baseline {
            DashBaseline::Greedy => greedy_sds_ma(o, k),
            DashBaseline::GreedyParallel => greedy_parallel(o, k, workers),
            DashBaseline::TopK => top_k(o, k),
            DashBaseline::Random => random_k(o, k, &mut ChaCha8Rng::seed_from_u64(seed)),
        })?;
        put(out, DashSelection { inner: res });
        Ok(())
    })
}

/// # Safety
/// `sel` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn dash_selection_len(sel: *const DashSelection) -> usize {
    sel.as_ref().map_or(0, |s| s.inner.selected.len())
}

/// Copies up to `cap` selected indices (ascending) into `buf`; returns the count copied.
///
/// # Safety
/// `sel` must be null or a live selection handle; `buf` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn dash_selection_indices(sel: *const DashSelection, buf: *mut usize, cap: usize) -> usize {
    let Some(s) = sel.as_ref() else { return 0 };
    if buf.is_null() {
        return 0;
    }
    let idx = s.inner.selected.as_slice();
    let count = idx.len().min(cap);
    ptr::copy_nonoverlapping(idx.as_ptr(), buf, count);
    count
}

/// Objective value of the selection (NaN for a null handle).
///
/// # Safety
/// `sel` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn dash_selection_value(sel: *const DashSelection) -> f64 {
    sel.as_ref().map_or(f64::NAN, |s| s.inner.value)
}

/// # Safety
/// `sel` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn dash_selection_rounds(sel: *const DashSelection) -> u64 {
    sel.as_ref().map_or(0, |s| s.inner.trace.adaptive_rounds)
}

/// # Safety
/// `sel` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn dash_selection_queries(sel: *const DashSelection) -> u64 {
    sel.as_ref().map_or(0, |s| s.inner.trace.total_queries)
}

/// The full result, trace included, as a JSON string to release with
/// [`dash_string_free`]. Null on failure.
///
/// # Safety
/// `sel` must be null or a live selection handle.
#[no_mangle]
pub unsafe extern "C" fn dash_selection_to_json(sel: *const DashSelection) -> *mut c_char {
    let Some(s) = sel.as_ref() else {
        set_error("selection is null");
        return ptr::null_mut();
    };
    match serde_json::to_string(&s.inner).map(CString::new) {
        Ok(Ok(c)) => c.into_raw(),
        _ => {
            set_error("cannot serialize selection");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dash_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `sel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dash_selection_free(sel: *mut DashSelection) {
    if !sel.is_null() {
        drop(Box::from_raw(sel));
    }
}
