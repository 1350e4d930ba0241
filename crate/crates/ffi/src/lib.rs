//! C ABI for beliefcast.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free` function. Every function that can fail returns an `int32_t`
//! status (`BC_OK` or a negative `BC_ERR_*` code) and writes results through
//! out-pointers. After a failure, `bc_last_error()` returns a message for the
//! calling thread; it is cleared by the next successful call.
//!
//! ```c
//! BcNetwork *net = NULL;
//! BcRun *run = NULL;
//! const char *targets[] = {"WTIp.1"};
//! double mean;
//! if (bc_network_from_file("base_case.network.json", &net) != BC_OK ||
//!     bc_simulate(net, targets, 1, 10000, 1990, &run) != BC_OK ||
//!     bc_run_mean(run, "WTIp.1", &mean) != BC_OK) {
//!     fprintf(stderr, "%s\n", bc_last_error());
//! }
//! bc_run_free(run);
//! bc_network_free(net);
//! ```

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use beliefcast::netcore::{Network, NetworkError, NodeId};
use beliefcast::sampler::{run_monte_carlo, samples_csv, summary_json, Forecast, SimulationError};
use beliefcast::scenario::{apply_overlay, Overlay, ScenarioError};

pub const BC_OK: i32 = 0;
pub const BC_ERR_NULL: i32 = -1;
pub const BC_ERR_UTF8: i32 = -2;
pub const BC_ERR_PARSE: i32 = -3;
pub const BC_ERR_VALIDATION: i32 = -4;
pub const BC_ERR_SIMULATION: i32 = -5;
pub const BC_ERR_UNKNOWN_TARGET: i32 = -6;
pub const BC_ERR_IO: i32 = -7;
pub const BC_ERR_PANIC: i32 = -99;

/// A validated network.
pub struct BcNetwork {
    net: Network,
}

/// Results of one simulation.
pub struct BcRun {
    forecast: Forecast,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Error {
    code: i32,
    message: String,
}

fn err(code: i32, message: impl Into<String>) -> Error {
    Error {
        code,
        message: message.into(),
    }
}

impl From<NetworkError> for Error {
    fn from(e: NetworkError) -> Self {
        let code = match e {
            NetworkError::Malformed(_) => BC_ERR_PARSE,
            _ => BC_ERR_VALIDATION,
        };
        err(code, e.to_string())
    }
}

impl From<ScenarioError> for Error {
    fn from(e: ScenarioError) -> Self {
        let code = match e {
            ScenarioError::Parse(_) => BC_ERR_PARSE,
            _ => BC_ERR_VALIDATION,
        };
        err(code, e.to_string())
    }
}

impl From<SimulationError> for Error {
    fn from(e: SimulationError) -> Self {
        let code = match e {
            SimulationError::UnknownTarget(_) => BC_ERR_UNKNOWN_TARGET,
            _ => BC_ERR_SIMULATION,
        };
        err(code, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', "\\0")).expect("interior NULs were replaced"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Run `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            BC_OK
        }
        Ok(Err(e)) => {
            set_last_error(Some(e.message));
            e.code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(Some(format!("internal panic: {msg}")));
            BC_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(err(BC_ERR_NULL, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| err(BC_ERR_UTF8, format!("{what} is not UTF-8: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| err(BC_ERR_NULL, format!("{what} is NULL")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Error> {
    p.as_mut().ok_or_else(|| err(BC_ERR_NULL, format!("{what} is NULL")))
}

fn new_string(s: String) -> Result<*mut c_char, Error> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| err(BC_ERR_UTF8, "output contains a NUL byte"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn bc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse and validate a network document.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn bc_network_from_json(json: *const c_char, out: *mut *mut BcNetwork) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let net = Network::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(BcNetwork { net }));
        Ok(())
    })
}

/// Read, parse and validate a network document file.
///
/// # Safety
/// As for [`bc_network_from_json`].
#[no_mangle]
pub unsafe extern "C" fn bc_network_from_file(path: *const c_char, out: *mut *mut BcNetwork) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let text = std::fs::read_to_string(path).map_err(|e| err(BC_ERR_IO, format!("{path}: {e}")))?;
        let net = Network::from_json(&text)?;
        *out = Box::into_raw(Box::new(BcNetwork { net }));
        Ok(())
    })
}

/// Release a network. NULL is ignored.
///
/// # Safety
/// `net` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bc_network_free(net: *mut BcNetwork) {
    if !net.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(net))));
    }
}

/// # Safety
/// `net` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn bc_network_node_count(net: *const BcNetwork, out: *mut usize) -> i32 {
    guard(|| {
        let net = ref_arg(net, "net")?;
        *out_arg(out, "out")? = net.net.len();
        Ok(())
    })
}

/// Apply an overlay document to `net`, producing a new network. `net` is unchanged.
///
/// # Safety
/// `net` a live handle, `overlay_json` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bc_network_apply_overlay(
    net: *const BcNetwork,
    overlay_json: *const c_char,
    out: *mut *mut BcNetwork,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let net = ref_arg(net, "net")?;
        let overlay = Overlay::from_json(str_arg(overlay_json, "overlay_json")?)?;
        let result = apply_overlay(&net.net, &overlay)?;
        *out = Box::into_raw(Box::new(BcNetwork { net: result }));
        Ok(())
    })
}

/// Canonical JSON of `net`. Free the string with [`bc_string_free`].
///
/// # Safety
/// `net` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bc_network_to_json(net: *const BcNetwork, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        *out = new_string(ref_arg(net, "net")?.net.to_json())?;
        Ok(())
    })
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Seeded Monte Carlo run over `n_targets` node ids.
///
/// # Safety
/// `net` a live handle; `targets` an array of `n_targets` NUL-terminated
/// strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bc_simulate(
    net: *const BcNetwork,
    targets: *const *const c_char,
    n_targets: usize,
    n: usize,
    seed: u64,
    out: *mut *mut BcRun,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let net = ref_arg(net, "net")?;
        if targets.is_null() {
            return Err(err(BC_ERR_NULL, "targets is NULL"));
        }
        let ids = (0..n_targets)
            .map(|i| str_arg(*targets.add(i), "target").map(NodeId::from))
            .collect::<Result<Vec<_>, _>>()?;
        let forecast = run_monte_carlo(&net.net, &ids, n, seed)?;
        *out = Box::into_raw(Box::new(BcRun { forecast }));
        Ok(())
    })
}

/// Release a run. NULL is ignored.
///
/// # Safety
/// `run` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bc_run_free(run: *mut BcRun) {
    if !run.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(run))));
    }
}

unsafe fn result_of<'a>(
    run: *const BcRun,
    target: *const c_char,
) -> Result<&'a beliefcast::sampler::ForecastResult, Error> {
    let run = ref_arg(run, "run")?;
    let target = str_arg(target, "target")?;
    run.forecast
        .get(target)
        .ok_or_else(|| err(BC_ERR_UNKNOWN_TARGET, format!("run has no target `{target}`")))
}

/// # Safety
/// `run` a live handle, `target` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bc_run_mean(run: *const BcRun, target: *const c_char, out: *mut f64) -> i32 {
    guard(|| {
        let r = result_of(run, target)?;
        *out_arg(out, "out")? = r.mean;
        Ok(())
    })
}

/// Population standard deviation of a target.
///
/// # Safety
/// As for [`bc_run_mean`].
#[no_mangle]
pub unsafe extern "C" fn bc_run_stddev(run: *const BcRun, target: *const c_char, out: *mut f64) -> i32 {
    guard(|| {
        let r = result_of(run, target)?;
        *out_arg(out, "out")? = r.stddev;
        Ok(())
    })
}

/// Copy up to `cap` samples of `target` into `buf` and store the total sample
/// count in `len`. Pass `buf = NULL` to query the count only.
///
/// # Safety
/// `buf` NULL or writable for `cap` doubles; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn bc_run_samples(
    run: *const BcRun,
    target: *const c_char,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> i32 {
    guard(|| {
        let r = result_of(run, target)?;
        let len = out_arg(len, "len")?;
        if !buf.is_null() {
            let k = cap.min(r.samples.len());
            ptr::copy_nonoverlapping(r.samples.as_ptr(), buf, k);
        }
        *len = r.samples.len();
        Ok(())
    })
}

/// JSON summary (`[{target, n, seed, mean, stddev, histogram}]`). Free with
/// [`bc_string_free`].
///
/// # Safety
/// `run` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bc_run_summary_json(run: *const BcRun, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        *out = new_string(summary_json(&ref_arg(run, "run")?.forecast))?;
        Ok(())
    })
}

/// Sample CSV (`index,target,value`). Free with [`bc_string_free`].
///
/// # Safety
/// `run` a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bc_run_samples_csv(run: *const BcRun, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        *out = new_string(samples_csv(&ref_arg(run, "run")?.forecast))?;
        Ok(())
    })
}
