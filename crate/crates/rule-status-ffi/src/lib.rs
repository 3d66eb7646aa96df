//! C interface to the rule status engine.
//!
//! The unit of work is a session: a rules file plus one trace, with every
//! status table computed up front. Sessions are opaque handles created by
//! [`rsa_session_new_from_files`] or [`rsa_session_new_from_kripke`] and
//! released with [`rsa_session_free`].
//!
//! Every fallible call returns a code from the `RSA_*` family. On failure
//! the call also leaves a message that [`rsa_last_error`] returns for the
//! calling thread. Strings handed out through `out` parameters are owned
//! by this library and must be released with [`rsa_string_free`]; query
//! results cross the boundary as JSON so the C side does not need a struct
//! per answer shape.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rule_status::query::{interesting_times, query_status, scan_globals, ScanEntry};
use rule_status::{assess, FormulaTree, Kripke, NodeAddress, StatusTable, Trace};

/// A trace time step. Matches the engine's time type.
pub type Time = i64;

/// The call succeeded.
pub const RSA_OK: i32 = 0;
/// A pointer was null, a string was not UTF-8, or a number was out of range.
pub const RSA_ERR_ARGUMENT: i32 = -1;
/// A file could not be read, parsed, or validated.
pub const RSA_ERR_INPUT: i32 = -2;
/// The session is fine but the question is not: bad node address or a time
/// outside the trace.
pub const RSA_ERR_QUERY: i32 = -3;
/// The engine panicked; the session may be in an unknown state.
pub const RSA_ERR_PANIC: i32 = -4;

/// Rules assessed against one trace. Opaque to C.
pub struct RsaSession {
    trace: Trace,
    tables: Vec<StatusTable>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(message).expect("NUL stripped"));
    });
}

/// Read a C string argument; on null or invalid UTF-8, record an error.
///
/// # Safety
///
/// `ptr` must be null or point at a NUL-terminated string.
unsafe fn arg_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error(format!("{name} must not be null"));
        return Err(RSA_ERR_ARGUMENT);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(format!("{name} is not valid UTF-8"));
            Err(RSA_ERR_ARGUMENT)
        }
    }
}

/// Hand `text` to the caller through `out`, which must not be null.
unsafe fn give_string(text: String, out: *mut *mut c_char) -> i32 {
    if out.is_null() {
        set_error("out pointer must not be null");
        return RSA_ERR_ARGUMENT;
    }
    let text = text.replace('\0', " ");
    unsafe { *out = CString::new(text).expect("NUL stripped").into_raw() };
    RSA_OK
}

fn guard(body: impl FnOnce() -> i32) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            RSA_ERR_PANIC
        }
    }
}

fn read_rules(path: &str) -> Result<Vec<FormulaTree>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let mut rules = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tree = FormulaTree::parse(line)
            .map_err(|e| format!("{path}:{}: {e}", index + 1))?;
        rules.push(tree);
    }
    if rules.is_empty() {
        return Err(format!("{path}: no rules found"));
    }
    Ok(rules)
}

fn build_session(rules: Vec<FormulaTree>, trace: Trace) -> RsaSession {
    let tables = rules.iter().map(|rule| assess(rule, &trace)).collect();
    RsaSession { trace, tables }
}

/// Fetch the table for a 1-based rule number.
fn table_of(session: &RsaSession, rule: usize) -> Result<&StatusTable, i32> {
    if rule == 0 || rule > session.tables.len() {
        set_error(format!(
            "rule {rule} does not exist; rules are numbered 1 to {}",
            session.tables.len()
        ));
        return Err(RSA_ERR_ARGUMENT);
    }
    Ok(&session.tables[rule - 1])
}

fn parse_address(node: &str) -> Result<NodeAddress, i32> {
    NodeAddress::parse(node).map_err(|e| {
        set_error(e.to_string());
        RSA_ERR_QUERY
    })
}

// ---------------------------------------------------------------------------
// Session lifecycle.

/// Create a session from a rules file and a trace JSON file.
///
/// On success writes the new session to `out_session` and returns
/// [`RSA_OK`]. The session must be released with [`rsa_session_free`].
///
/// # Safety
///
/// `rules_path` and `trace_path` must be NUL-terminated strings and
/// `out_session` must point at writable memory.
#[no_mangle]
pub unsafe extern "C" fn rsa_session_new_from_files(
    rules_path: *const c_char,
    trace_path: *const c_char,
    out_session: *mut *mut RsaSession,
) -> i32 {
    guard(|| {
        let rules_path = match unsafe { arg_str(rules_path, "rules_path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let trace_path = match unsafe { arg_str(trace_path, "trace_path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        if out_session.is_null() {
            set_error("out_session must not be null");
            return RSA_ERR_ARGUMENT;
        }
        let rules = match read_rules(rules_path) {
            Ok(rules) => rules,
            Err(message) => {
                set_error(message);
                return RSA_ERR_INPUT;
            }
        };
        let trace = match Trace::load(trace_path) {
            Ok(trace) => trace,
            Err(e) => {
                set_error(e.to_string());
                return RSA_ERR_INPUT;
            }
        };
        let session = Box::new(build_session(rules, trace));
        unsafe { *out_session = Box::into_raw(session) };
        RSA_OK
    })
}

/// Create a session from a rules file plus a Kripke structure and a run
/// through it; the trace is induced from the run and starts at
/// `start_time`.
///
/// # Safety
///
/// The three paths must be NUL-terminated strings and `out_session` must
/// point at writable memory.
#[no_mangle]
pub unsafe extern "C" fn rsa_session_new_from_kripke(
    rules_path: *const c_char,
    kripke_path: *const c_char,
    run_path: *const c_char,
    start_time: Time,
    out_session: *mut *mut RsaSession,
) -> i32 {
    guard(|| {
        let rules_path = match unsafe { arg_str(rules_path, "rules_path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let kripke_path = match unsafe { arg_str(kripke_path, "kripke_path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let run_path = match unsafe { arg_str(run_path, "run_path") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        if out_session.is_null() {
            set_error("out_session must not be null");
            return RSA_ERR_ARGUMENT;
        }
        let rules = match read_rules(rules_path) {
            Ok(rules) => rules,
            Err(message) => {
                set_error(message);
                return RSA_ERR_INPUT;
            }
        };
        let kripke = match Kripke::load(kripke_path) {
            Ok(k) => k,
            Err(e) => {
                set_error(e.to_string());
                return RSA_ERR_INPUT;
            }
        };
        let run_text = match std::fs::read_to_string(run_path) {
            Ok(text) => text,
            Err(e) => {
                set_error(format!("{run_path}: {e}"));
                return RSA_ERR_INPUT;
            }
        };
        let run = rule_status::trace::run_from_str(&run_text);
        let trace = match kripke.induce_trace(&run, start_time) {
            Ok(trace) => trace,
            Err(e) => {
                set_error(e.to_string());
                return RSA_ERR_INPUT;
            }
        };
        let session = Box::new(build_session(rules, trace));
        unsafe { *out_session = Box::into_raw(session) };
        RSA_OK
    })
}

/// Release a session. A null pointer is a no-op.
///
/// # Safety
///
/// `session` must be null or a pointer from one of the constructors, and
/// must not be used after this call.
#[no_mangle]
pub unsafe extern "C" fn rsa_session_free(session: *mut RsaSession) {
    if !session.is_null() {
        drop(unsafe { Box::from_raw(session) });
    }
}

/// Number of rules in the session; 0 if `session` is null.
///
/// # Safety
///
/// `session` must be null or a live session pointer.
#[no_mangle]
pub unsafe extern "C" fn rsa_session_rule_count(session: *const RsaSession) -> usize {
    match unsafe { session.as_ref() } {
        Some(session) => session.tables.len(),
        None => 0,
    }
}

/// First and last time of the session's trace, the legal window for query
/// times.
///
/// # Safety
///
/// `session` must be a live session pointer; `out_start` and `out_end`
/// must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rsa_session_time_range(
    session: *const RsaSession,
    out_start: *mut Time,
    out_end: *mut Time,
) -> i32 {
    let Some(session) = (unsafe { session.as_ref() }) else {
        set_error("session must not be null");
        return RSA_ERR_ARGUMENT;
    };
    if !out_start.is_null() {
        unsafe { *out_start = session.trace.start_time() };
    }
    if !out_end.is_null() {
        unsafe { *out_end = session.trace.end_time() };
    }
    RSA_OK
}

// ---------------------------------------------------------------------------
// Questions about a session.

/// Status of one rule node at time `t`, read from the suffix starting at
/// `t0`. `node` is a dotted child path such as "1.2"; the empty string
/// names the root. On success writes a JSON object (fields `rule`, `node`,
/// `t0`, `t`, `status`, `text`) to `out_json`.
///
/// # Safety
///
/// `session` must be a live session pointer, `node` a NUL-terminated
/// string, and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn rsa_query(
    session: *const RsaSession,
    rule: usize,
    node: *const c_char,
    t0: Time,
    t: Time,
    out_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let Some(session) = (unsafe { session.as_ref() }) else {
            set_error("session must not be null");
            return RSA_ERR_ARGUMENT;
        };
        let node = match unsafe { arg_str(node, "node") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let table = match table_of(session, rule) {
            Ok(table) => table,
            Err(code) => return code,
        };
        let address = match parse_address(node) {
            Ok(address) => address,
            Err(code) => return code,
        };
        match query_status(table, rule, &address, t0, t) {
            Ok(result) => unsafe {
                give_string(serde_json::to_string(&result).expect("serialize"), out_json)
            },
            Err(e) => {
                set_error(e.to_string());
                RSA_ERR_QUERY
            }
        }
    })
}

/// Suffix starts worth a look for one rule node: every time its own-suffix
/// status enters active or violated. Writes a JSON array of times.
///
/// # Safety
///
/// Same contract as [`rsa_query`].
#[no_mangle]
pub unsafe extern "C" fn rsa_interesting_times(
    session: *const RsaSession,
    rule: usize,
    node: *const c_char,
    out_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let Some(session) = (unsafe { session.as_ref() }) else {
            set_error("session must not be null");
            return RSA_ERR_ARGUMENT;
        };
        let node = match unsafe { arg_str(node, "node") } {
            Ok(s) => s,
            Err(code) => return code,
        };
        let table = match table_of(session, rule) {
            Ok(table) => table,
            Err(code) => return code,
        };
        let address = match parse_address(node) {
            Ok(address) => address,
            Err(code) => return code,
        };
        match interesting_times(table, &address) {
            Ok(times) => unsafe {
                give_string(
                    serde_json::to_string(&times.times()).expect("serialize"),
                    out_json,
                )
            },
            Err(e) => {
                set_error(e.to_string());
                RSA_ERR_QUERY
            }
        }
    })
}

/// Ask every always-rule what its body is doing at instant `t`. With
/// `only_satisfied`, hits are restricted to satisfied bodies. Writes a
/// JSON array: `{"kind": "hit", "result": {...}}` per reported body and
/// `{"kind": "skipped_non_global", "rule": n}` per rule the scan cannot
/// cover.
///
/// # Safety
///
/// `session` must be a live session pointer and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn rsa_scan(
    session: *const RsaSession,
    t: Time,
    only_satisfied: bool,
    out_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let Some(session) = (unsafe { session.as_ref() }) else {
            set_error("session must not be null");
            return RSA_ERR_ARGUMENT;
        };
        match scan_globals(&session.tables, t, only_satisfied) {
            Ok(entries) => {
                let entries: Vec<serde_json::Value> = entries
                    .iter()
                    .map(|entry| match entry {
                        ScanEntry::Hit(result) => serde_json::json!({
                            "kind": "hit",
                            "result": result,
                        }),
                        ScanEntry::SkippedNonGlobal { rule } => serde_json::json!({
                            "kind": "skipped_non_global",
                            "rule": rule,
                        }),
                    })
                    .collect();
                unsafe {
                    give_string(
                        serde_json::to_string(&entries).expect("serialize"),
                        out_json,
                    )
                }
            }
            Err(e) => {
                set_error(e.to_string());
                RSA_ERR_QUERY
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Errors and string ownership.

/// Message for the most recent failure on this thread, or null if there
/// has been none. The pointer stays valid until the next failing call on
/// the same thread; do not free it.
///
/// # Safety
///
/// Only the validity window above.
#[no_mangle]
pub unsafe extern "C" fn rsa_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(message) => message.as_ptr(),
        None => std::ptr::null(),
    })
}

/// Release a string returned through an `out` parameter. A null pointer is
/// a no-op.
///
/// # Safety
///
/// `s` must be null or a pointer this library handed out, and must not be
/// used after this call.
#[no_mangle]
pub unsafe extern "C" fn rsa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
