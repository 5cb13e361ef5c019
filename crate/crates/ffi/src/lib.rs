//! C ABI over `tsaug`: opaque dataset handles, status codes and a
//! per-thread last-error message. The header `include/tsaug.h` is generated
//! from this file by the build script.
//!
//! Every function returning [`TsaugStatus`] leaves its out-parameters
//! untouched on failure; call [`tsaug_last_error`] for the reason.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use tsaug::bench::{accuracy, knn1_classify, Classifier};
use tsaug::dtw::{dtw, DtwParams};
use tsaug::series::{fit_normalizer, load_ucr_tsv, write_ucr_tsv, Split};
use tsaug::{expand_with_jobs, AugmentSpec, Dataset, Error, Method, TimeSeries};

/// Result of every fallible call. Values 2 to 4 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsaugStatus {
    Ok = 0,
    UnknownMethod = 2,
    Io = 3,
    InvalidArgument = 4,
    NullPointer = 6,
    OutOfRange = 7,
    Panic = 8,
}

/// Opaque labelled dataset. Create with [`tsaug_dataset_load`] or
/// [`tsaug_expand`]; release with [`tsaug_dataset_free`].
pub struct TsaugDataset {
    inner: Dataset,
    labels: Vec<CString>,
}

impl TsaugDataset {
    fn new(inner: Dataset) -> Self {
        let labels = inner
            .items()
            .iter()
            .map(|it| CString::new(it.label.as_str().replace('\0', "")).unwrap_or_default())
            .collect();
        Self { inner, labels }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: TsaugStatus, msg: impl Into<String>) -> TsaugStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> TsaugStatus {
    let status = match e.exit_code() {
        2 => TsaugStatus::UnknownMethod,
        3 => TsaugStatus::Io,
        _ => TsaugStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting panics into [`TsaugStatus::Panic`].
fn guard(f: impl FnOnce() -> TsaugStatus) -> TsaugStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == TsaugStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(TsaugStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, TsaugStatus> {
    if p.is_null() {
        return Err(fail(TsaugStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TsaugStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn dataset_arg<'a>(p: *const TsaugDataset) -> Result<&'a TsaugDataset, TsaugStatus> {
    p.as_ref().ok_or_else(|| fail(TsaugStatus::NullPointer, "dataset handle is NULL"))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], TsaugStatus> {
    if p.is_null() {
        return Err(fail(TsaugStatus::NullPointer, format!("{what} is NULL")));
    }
    if len == 0 {
        return Err(fail(TsaugStatus::InvalidArgument, format!("{what} is empty")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message describing the last failure on the calling thread, or an empty
/// string. Valid until the next `tsaug_*` call on the same thread.
#[no_mangle]
pub extern "C" fn tsaug_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Number of registered methods, including the `none` baseline.
#[no_mangle]
pub extern "C" fn tsaug_method_count() -> usize {
    Method::ALL.len()
}

/// Static NUL-terminated id of method `index`, or NULL when out of range.
#[no_mangle]
pub extern "C" fn tsaug_method_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| Method::ALL.iter().map(|m| CString::new(m.id()).unwrap()).collect());
    names.get(index).map_or(ptr::null(), |n| n.as_ptr())
}

/// Loads a UCR-format file into a new handle stored in `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dataset_load(path: *const c_char, out: *mut *mut TsaugDataset) -> TsaugStatus {
    guard(|| {
        let path = attempt!(str_arg(path, "path"));
        if out.is_null() {
            return fail(TsaugStatus::NullPointer, "out is NULL");
        }
        let split = if path.to_ascii_uppercase().contains("_TEST") {
            Split::Test
        } else {
            Split::Train
        };
        match load_ucr_tsv(path, split) {
            Ok(ds) => {
                *out = Box::into_raw(Box::new(TsaugDataset::new(ds)));
                TsaugStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `dataset` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dataset_free(dataset: *mut TsaugDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Number of series in the dataset; 0 for NULL.
///
/// # Safety
/// `dataset` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dataset_len(dataset: *const TsaugDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.len())
}

/// Length of series `index` in `*out_len`.
///
/// # Safety
/// `dataset` must be a live handle and `out_len` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dataset_series_len(
    dataset: *const TsaugDataset,
    index: usize,
    out_len: *mut usize,
) -> TsaugStatus {
    guard(|| {
        let ds = attempt!(dataset_arg(dataset));
        if out_len.is_null() {
            return fail(TsaugStatus::NullPointer, "out_len is NULL");
        }
        match ds.inner.items().get(index) {
            Some(it) => {
                *out_len = it.series.len();
                TsaugStatus::Ok
            }
            None => fail(TsaugStatus::OutOfRange, format!("index {index} >= {}", ds.inner.len())),
        }
    })
}

/// Copies series `index` into `buf`, which must hold at least its length.
///
/// # Safety
/// `buf` must be valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dataset_series(
    dataset: *const TsaugDataset,
    index: usize,
    buf: *mut f64,
    capacity: usize,
) -> TsaugStatus {
    guard(|| {
        let ds = attempt!(dataset_arg(dataset));
        if buf.is_null() {
            return fail(TsaugStatus::NullPointer, "buf is NULL");
        }
        let Some(it) = ds.inner.items().get(index) else {
            return fail(TsaugStatus::OutOfRange, format!("index {index} >= {}", ds.inner.len()));
        };
        let values = it.series.values();
        if capacity < values.len() {
            return fail(
                TsaugStatus::OutOfRange,
                format!("buffer holds {capacity} values, series has {}", values.len()),
            );
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        TsaugStatus::Ok
    })
}

/// Label of series `index` as a string owned by the handle, or NULL.
///
/// # Safety
/// `dataset` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dataset_label(dataset: *const TsaugDataset, index: usize) -> *const c_char {
    dataset
        .as_ref()
        .and_then(|d| d.labels.get(index))
        .map_or(ptr::null(), |l| l.as_ptr())
}

/// Rescales `train` to [-1, 1] using its own range and zeroes missing
/// values. `test`, when not NULL, is rescaled with the same train range.
///
/// # Safety
/// `train` must be a live handle; `test` NULL or a different live handle.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dataset_normalize(train: *mut TsaugDataset, test: *mut TsaugDataset) -> TsaugStatus {
    guard(|| {
        if ptr::eq(train, test) {
            return fail(TsaugStatus::InvalidArgument, "train and test must be different handles");
        }
        let Some(tr) = train.as_mut() else {
            return fail(TsaugStatus::NullPointer, "train handle is NULL");
        };
        let params = fit_normalizer(&tr.inner);
        if let Some(te) = test.as_mut() {
            *te = TsaugDataset::new(te.inner.normalized(&params).sanitized());
        }
        *tr = TsaugDataset::new(tr.inner.normalized(&params).sanitized());
        TsaugStatus::Ok
    })
}

/// Expands `train` with `method`, storing a new handle in `*out`.
/// `params` holds `key=value` pairs separated by `;` and may be NULL.
/// `jobs` = 0 uses every core; the output does not depend on it.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsaug_expand(
    train: *const TsaugDataset,
    method: *const c_char,
    factor: usize,
    seed: u64,
    params: *const c_char,
    jobs: usize,
    out: *mut *mut TsaugDataset,
) -> TsaugStatus {
    guard(|| {
        let ds = attempt!(dataset_arg(train));
        let method = attempt!(str_arg(method, "method"));
        if out.is_null() {
            return fail(TsaugStatus::NullPointer, "out is NULL");
        }
        let method: Method = match method.parse() {
            Ok(m) => m,
            Err(e) => return from_error(e),
        };
        let mut spec = AugmentSpec::new(method, seed);
        spec.factor = factor;
        if !params.is_null() {
            let text = attempt!(str_arg(params, "params"));
            let pairs = text.split(';').map(str::trim).filter(|p| !p.is_empty());
            if let Err(e) = spec.params.apply_assignments(pairs) {
                return from_error(e);
            }
        }
        match expand_with_jobs(&ds.inner, &spec, jobs) {
            Ok((expanded, _)) => {
                *out = Box::into_raw(Box::new(TsaugDataset::new(expanded)));
                TsaugStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Writes the dataset in UCR tab-separated format.
///
/// # Safety
/// `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dataset_write(dataset: *const TsaugDataset, path: *const c_char) -> TsaugStatus {
    guard(|| {
        let ds = attempt!(dataset_arg(dataset));
        let path = attempt!(str_arg(path, "path"));
        match write_ucr_tsv(&ds.inner, path) {
            Ok(()) => TsaugStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Banded DTW distance (squared local cost). `window_fraction` = 1 is
/// unconstrained.
///
/// # Safety
/// `x` and `y` must be valid for `nx` and `ny` reads; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsaug_dtw_distance(
    x: *const f64,
    nx: usize,
    y: *const f64,
    ny: usize,
    window_fraction: f64,
    out: *mut f64,
) -> TsaugStatus {
    guard(|| {
        let x = attempt!(slice_arg(x, nx, "x"));
        let y = attempt!(slice_arg(y, ny, "y"));
        if out.is_null() {
            return fail(TsaugStatus::NullPointer, "out is NULL");
        }
        if !(0.0..=1.0).contains(&window_fraction) {
            return fail(TsaugStatus::InvalidArgument, "window_fraction must be in [0, 1]");
        }
        let params = DtwParams::banded(window_fraction);
        *out = dtw(&TimeSeries::new(x.to_vec()), &TimeSeries::new(y.to_vec()), &params).distance;
        TsaugStatus::Ok
    })
}

/// 1-NN accuracy of `test` against `train`. A negative `window_fraction`
/// selects Euclidean distance; otherwise banded DTW.
///
/// # Safety
/// Both handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tsaug_knn1_accuracy(
    train: *const TsaugDataset,
    test: *const TsaugDataset,
    window_fraction: f64,
    out: *mut f64,
) -> TsaugStatus {
    guard(|| {
        let tr = attempt!(dataset_arg(train));
        let te = attempt!(dataset_arg(test));
        if out.is_null() {
            return fail(TsaugStatus::NullPointer, "out is NULL");
        }
        let classifier = if window_fraction < 0.0 {
            Classifier::Euclidean
        } else if window_fraction <= 1.0 {
            Classifier::Dtw { window_fraction }
        } else {
            return fail(TsaugStatus::InvalidArgument, "window_fraction must be <= 1");
        };
        let truth: Vec<_> = te.inner.items().iter().map(|it| it.label.clone()).collect();
        match knn1_classify(&tr.inner, &te.inner, classifier).and_then(|p| accuracy(&p, &truth)) {
            Ok(acc) => {
                *out = acc;
                TsaugStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
