//! C ABI for res-kernel.
//!
//! Every function returns an [`RkStatus`]. On failure a message is available
//! from [`rk_last_error_message`] on the same thread. Strings returned through
//! out-pointers are owned by the caller and released with [`rk_string_free`];
//! ideal handles are released with [`rk_ideal_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use res_kernel::driver::DEFAULT_BUDGET;
use res_kernel::ideal::Ideal;
use res_kernel::order::{max_order, Order};
use res_kernel::poly::{parse_many, vars};
use res_kernel::toric::{resolve_fan_2d, Fan};
use res_kernel::trace::{check_trace, run_input, OutcomeStatus, TraceDocument, TraceInput, TraceMode};
use res_kernel::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RkStatus {
    Ok = 0,
    ParseError = 1,
    DriverFailure = 2,
    BudgetExhausted = 3,
    InvalidArgument = 4,
    Internal = 5,
}

/// Opaque ideal handle.
pub struct RkIdeal {
    ideal: Ideal,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> RkStatus {
    match e {
        e if e.is_parse() => RkStatus::ParseError,
        Error::BudgetExhausted(_) => RkStatus::BudgetExhausted,
        Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => RkStatus::InvalidArgument,
        _ => RkStatus::DriverFailure,
    }
}

fn fail(e: Error) -> RkStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> RkStatus) -> RkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal error");
            RkStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, RkStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(RkStatus::InvalidArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        RkStatus::InvalidArgument
    })
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> RkStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            RkStatus::Ok
        }
        Err(_) => {
            set_error("output contains a NUL byte");
            RkStatus::Internal
        }
    }
}

/// Parse an ideal. `vars_csv` is a comma-separated list of variable names and
/// `gens` an array of `n_gens` generator strings.
///
/// # Safety
/// `vars_csv` and each `gens[i]` must be valid NUL-terminated strings; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn rk_ideal_parse(
    vars_csv: *const c_char,
    gens: *const *const c_char,
    n_gens: usize,
    out: *mut *mut RkIdeal,
) -> RkStatus {
    guard(|| {
        if out.is_null() || (gens.is_null() && n_gens > 0) {
            set_error("null pointer argument");
            return RkStatus::InvalidArgument;
        }
        let names = match str_arg(vars_csv, "vars") {
            Ok(s) => split_list(s),
            Err(s) => return s,
        };
        if names.is_empty() {
            set_error("no variables given");
            return RkStatus::InvalidArgument;
        }
        let mut texts = Vec::with_capacity(n_gens);
        for i in 0..n_gens {
            match str_arg(*gens.add(i), "generator") {
                Ok(s) => texts.push(s),
                Err(s) => return s,
            }
        }
        let v = vars(&names);
        match parse_many(&texts, &v) {
            Ok(ps) => {
                *out = Box::into_raw(Box::new(RkIdeal { ideal: Ideal::new(&v, ps) }));
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Maximal order of the ideal over all points; `-1` for the zero ideal.
///
/// # Safety
/// `ideal` must come from [`rk_ideal_parse`]; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rk_ideal_max_order(ideal: *const RkIdeal, out: *mut i64) -> RkStatus {
    guard(|| {
        if ideal.is_null() || out.is_null() {
            set_error("null pointer argument");
            return RkStatus::InvalidArgument;
        }
        match max_order(&(*ideal).ideal) {
            Ok(Order::Finite(k)) => {
                *out = i64::from(k);
                RkStatus::Ok
            }
            Ok(Order::Infinity) => {
                *out = -1;
                RkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `ideal` must come from [`rk_ideal_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rk_ideal_free(ideal: *mut RkIdeal) {
    if !ideal.is_null() {
        drop(Box::from_raw(ideal));
    }
}

/// Principalize the ideal and return the JSON trace document in `out_json`.
/// `exceptional` is a comma-separated list or null; `budget` 0 means the
/// default. The document is also returned when the status is
/// `DriverFailure` or `BudgetExhausted`.
///
/// # Safety
/// `ideal` must come from [`rk_ideal_parse`]; `exceptional` must be null or a
/// valid string; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rk_principalize(
    ideal: *const RkIdeal,
    exceptional: *const c_char,
    budget: usize,
    out_json: *mut *mut c_char,
) -> RkStatus {
    guard(|| {
        if ideal.is_null() || out_json.is_null() {
            set_error("null pointer argument");
            return RkStatus::InvalidArgument;
        }
        *out_json = ptr::null_mut();
        let exc = if exceptional.is_null() {
            Vec::new()
        } else {
            match str_arg(exceptional, "exceptional") {
                Ok(s) => split_list(s),
                Err(s) => return s,
            }
        };
        let i = &(*ideal).ideal;
        let input = TraceInput {
            mode: TraceMode::Principalize,
            vars: i.vars().to_vec(),
            ideal: i.gens().iter().map(|g| g.to_string()).collect(),
            exceptional: exc,
            mark: None,
            budget: if budget == 0 { DEFAULT_BUDGET } else { budget },
            contact: None,
        };
        let doc = match run_input(input, false) {
            Ok(d) => d,
            Err(e) => return fail(e),
        };
        let status = match doc.outcome.status {
            OutcomeStatus::Principalized | OutcomeStatus::OrderReduced => RkStatus::Ok,
            OutcomeStatus::Failed => RkStatus::DriverFailure,
            OutcomeStatus::BudgetExhausted => RkStatus::BudgetExhausted,
        };
        if status != RkStatus::Ok {
            set_error(doc.outcome.reason.clone().unwrap_or_default());
        }
        match put_string(out_json, doc.to_json()) {
            RkStatus::Ok => status,
            s => s,
        }
    })
}

/// Re-verify a JSON trace document. `Ok` if accepted, `DriverFailure` if
/// rejected, `ParseError` if malformed.
///
/// # Safety
/// `json` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rk_check_trace(json: *const c_char) -> RkStatus {
    guard(|| {
        let s = match str_arg(json, "json") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match TraceDocument::from_json(s).and_then(|d| check_trace(&d)) {
            Ok(_) => RkStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Resolve a 2-dimensional fan given in the text format (`dim 2`, then one
/// cone per line); the resolved fan is returned in the same format.
///
/// # Safety
/// `fan_text` must be a valid string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rk_toric_resolve(fan_text: *const c_char, out: *mut *mut c_char) -> RkStatus {
    guard(|| {
        if out.is_null() {
            set_error("null pointer argument");
            return RkStatus::InvalidArgument;
        }
        *out = ptr::null_mut();
        let s = match str_arg(fan_text, "fan") {
            Ok(s) => s,
            Err(s) => return s,
        };
        match s.parse::<Fan>().and_then(|f| resolve_fan_2d(&f)) {
            Ok(r) => put_string(out, r.to_string()),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn rk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn rk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
