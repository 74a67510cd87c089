//! C ABI over the topicpath engine: opaque handles, status codes, and a
//! thread-local last-error message.
//!
//! The exported surface is declared in `include/topicpath.h`. All handle
//! functions are safe to call from any thread as long as each handle is
//! used from one thread at a time. Strings are NUL-terminated UTF-8;
//! returned error strings stay valid until the next failing call on the
//! same thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use topicpath::config::RunConfig;
use topicpath::corpus::{self, Microblog};
use topicpath::engine::Engine;
use topicpath::error::Error;
use topicpath::sentiment;
use topicpath::{report, snapshot};

/// Status codes returned by every fallible entry point.
pub const TP_OK: c_int = 0;
pub const TP_ERR_CONFIG: c_int = 1;
pub const TP_ERR_IO: c_int = 2;
pub const TP_ERR_INVALID_ARGUMENT: c_int = 3;
pub const TP_ERR_RUNTIME: c_int = 4;

/// Opaque engine handle.
pub struct TpEngine {
    engine: Engine,
    buffered: Vec<Microblog>,
    skipped: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> c_int {
    match err {
        Error::Io(_) => TP_ERR_IO,
        Error::Config(_) | Error::Lexicon(_) => TP_ERR_CONFIG,
        Error::SnapshotVersion { .. } | Error::Snapshot(_) | Error::Json(_) => TP_ERR_CONFIG,
        _ => TP_ERR_RUNTIME,
    }
}

fn fail(err: &Error) -> c_int {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs a closure, converting panics into `TP_ERR_RUNTIME`.
fn guarded<F: FnOnce() -> c_int>(f: F) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            TP_ERR_RUNTIME
        }
    }
}

unsafe fn opt_str<'a>(ptr: *const c_char) -> Result<Option<&'a str>, c_int> {
    if ptr.is_null() {
        return Ok(None);
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(Some(s)),
        Err(_) => {
            set_error("argument is not valid UTF-8");
            Err(TP_ERR_INVALID_ARGUMENT)
        }
    }
}

unsafe fn req_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, c_int> {
    match opt_str(ptr)? {
        Some(s) => Ok(s),
        None => {
            set_error(&format!("{what} must not be NULL"));
            Err(TP_ERR_INVALID_ARGUMENT)
        }
    }
}

fn new_engine(config_path: Option<&str>, seed: Option<u64>) -> Result<TpEngine, Error> {
    let (cfg, _warnings) = RunConfig::load(config_path.map(Path::new), seed)?;
    Ok(TpEngine {
        engine: Engine::new(cfg)?,
        buffered: Vec::new(),
        skipped: 0,
    })
}

unsafe fn put_engine(out: *mut *mut TpEngine, handle: TpEngine) -> c_int {
    if out.is_null() {
        set_error("out handle must not be NULL");
        return TP_ERR_INVALID_ARGUMENT;
    }
    *out = Box::into_raw(Box::new(handle));
    TP_OK
}

/// Creates an engine from a config file path (NULL for defaults).
///
/// # Safety
/// `config_path` must be NULL or a NUL-terminated string; `out` must point
/// to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_new(
    config_path: *const c_char,
    out: *mut *mut TpEngine,
) -> c_int {
    guarded(|| {
        let path = match opt_str(config_path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match new_engine(path, None) {
            Ok(handle) => put_engine(out, handle),
            Err(e) => fail(&e),
        }
    })
}

/// As `tp_engine_new`, overriding the RNG seed.
///
/// # Safety
/// See `tp_engine_new`.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_new_seeded(
    config_path: *const c_char,
    seed: u64,
    out: *mut *mut TpEngine,
) -> c_int {
    guarded(|| {
        let path = match opt_str(config_path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match new_engine(path, Some(seed)) {
            Ok(handle) => put_engine(out, handle),
            Err(e) => fail(&e),
        }
    })
}

/// Restores an engine from a snapshot file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as in `tp_engine_new`.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_from_snapshot(
    path: *const c_char,
    out: *mut *mut TpEngine,
) -> c_int {
    guarded(|| {
        let path = match req_str(path, "snapshot path") {
            Ok(p) => p,
            Err(status) => return status,
        };
        match snapshot::load(Path::new(path)) {
            Ok(engine) => put_engine(
                out,
                TpEngine {
                    engine,
                    buffered: Vec::new(),
                    skipped: 0,
                },
            ),
            Err(e) => fail(&e),
        }
    })
}

/// Buffers one line-delimited JSON message (`id`, `timestamp`, `text`).
/// Returns `TP_ERR_INVALID_ARGUMENT` for malformed lines, which are also
/// counted on the handle but are not fatal to the run.
///
/// # Safety
/// `engine` must be a live handle from this library; `json_line` a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_feed_json(
    engine: *mut TpEngine,
    json_line: *const c_char,
) -> c_int {
    guarded(|| {
        let Some(handle) = engine.as_mut() else {
            set_error("engine handle must not be NULL");
            return TP_ERR_INVALID_ARGUMENT;
        };
        let line = match req_str(json_line, "json line") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match corpus::parse_jsonl_line(line) {
            None => TP_OK,
            Some(Ok(message)) => {
                handle.buffered.push(message);
                TP_OK
            }
            Some(Err(e)) => {
                handle.skipped += 1;
                set_error(&format!("malformed message: {e}"));
                TP_ERR_INVALID_ARGUMENT
            }
        }
    })
}

/// Segments and processes every buffered message beyond the last processed
/// batch, then clears the buffer.
///
/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_process(engine: *mut TpEngine) -> c_int {
    guarded(|| {
        let Some(handle) = engine.as_mut() else {
            set_error("engine handle must not be NULL");
            return TP_ERR_INVALID_ARGUMENT;
        };
        let messages = std::mem::take(&mut handle.buffered);
        match handle.engine.ingest(messages) {
            Ok(_) => TP_OK,
            Err(e) => fail(&e),
        }
    })
}

/// Writes pathways.json, events.csv, coherence.csv and the per-segment
/// term files into `out_dir`.
///
/// # Safety
/// `engine` must be a live handle; `out_dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_write_reports(
    engine: *mut TpEngine,
    out_dir: *const c_char,
) -> c_int {
    guarded(|| {
        let Some(handle) = engine.as_ref() else {
            set_error("engine handle must not be NULL");
            return TP_ERR_INVALID_ARGUMENT;
        };
        let dir = match req_str(out_dir, "output directory") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match report::write_all(&handle.engine, Path::new(dir)) {
            Ok(_) => TP_OK,
            Err(e) => fail(&e),
        }
    })
}

/// Saves a resumable snapshot.
///
/// # Safety
/// `engine` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_save_snapshot(
    engine: *const TpEngine,
    path: *const c_char,
) -> c_int {
    guarded(|| {
        let Some(handle) = engine.as_ref() else {
            set_error("engine handle must not be NULL");
            return TP_ERR_INVALID_ARGUMENT;
        };
        let path = match req_str(path, "snapshot path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        match snapshot::save(&handle.engine, Path::new(path)) {
            Ok(()) => TP_OK,
            Err(e) => fail(&e),
        }
    })
}

/// Scores one raw message with the engine's lexicon. `pos` gets 1..=4,
/// `neg` gets -4..=-1.
///
/// # Safety
/// `engine` must be a live handle; `text` NUL-terminated; `pos` and `neg`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_score_message(
    engine: *const TpEngine,
    text: *const c_char,
    pos: *mut c_int,
    neg: *mut c_int,
) -> c_int {
    guarded(|| {
        let Some(handle) = engine.as_ref() else {
            set_error("engine handle must not be NULL");
            return TP_ERR_INVALID_ARGUMENT;
        };
        let text = match req_str(text, "text") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if pos.is_null() || neg.is_null() {
            set_error("pos/neg out pointers must not be NULL");
            return TP_ERR_INVALID_ARGUMENT;
        }
        let score = sentiment::score_message(text, &handle.engine.config().lexicon);
        *pos = score.pos as c_int;
        *neg = score.neg as c_int;
        TP_OK
    })
}

/// Index of the last processed batch, or -1 when nothing has been
/// processed. NULL handles also return -1.
///
/// # Safety
/// `engine` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_last_batch(engine: *const TpEngine) -> i64 {
    match engine.as_ref() {
        Some(handle) => handle.engine.last_batch().map_or(-1, |b| b as i64),
        None => -1,
    }
}

/// Number of pathways discovered so far (0 for NULL handles).
///
/// # Safety
/// `engine` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_pathway_count(engine: *const TpEngine) -> u64 {
    match engine.as_ref() {
        Some(handle) => handle.engine.tracker().pathway_count() as u64,
        None => 0,
    }
}

/// Malformed messages rejected by `tp_engine_feed_json` so far.
///
/// # Safety
/// `engine` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_skipped_messages(engine: *const TpEngine) -> u64 {
    match engine.as_ref() {
        Some(handle) => handle.skipped,
        None => 0,
    }
}

/// The last error message on this thread; empty until a call fails. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Frees a handle. NULL is a no-op.
///
/// # Safety
/// `engine` must be NULL or a pointer returned by one of the constructors,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tp_engine_free(engine: *mut TpEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
