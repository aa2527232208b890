//! C ABI for the contribution assessor, the first-checkpoint decision and
//! whole scenario runs.
//!
//! Every function returns a [`CoopnavStatus`]; on failure a message for the
//! calling thread is available from [`coopnav_last_error_message`]. Objects
//! are opaque handles created by `*_new`/`coopnav_run_*` and released with
//! the matching `*_free`. Strings returned by the library are released with
//! [`coopnav_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use coopnav::assessor::{
    assess_situation, contribution_metric, discounted_mean, signed_contribution, ContributionRecord,
    CrossingInfo, Direction, SituationPredicates, Thresholds,
};
use coopnav::cli::config::{builtin_scenario, load_config};
use coopnav::cli::trace::trace_to_string;
use coopnav::decision::{first_checkpoint_cue, CueKind};
use coopnav::geometry::{Band, Vec2};
use coopnav::sim::{run_scenario, RunTrace};
use coopnav::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoopnavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NoObservations = 3,
    Config = 4,
    Planning = 5,
    Io = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoopnavDirection {
    Left = 0,
    Right = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoopnavCueKind {
    InformDirection = 0,
    InformConstrainedSuggestDirection = 1,
    IndicateWillDockIfNeeded = 2,
    AskMoveMore = 3,
    DockToWall = 4,
    ThankYou = 5,
    Silent = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoopnavThresholds {
    pub tau_h: f64,
    pub tau_oh: f64,
    pub tau_or: f64,
    pub tau_hr: f64,
    pub gamma: f64,
    pub tau_cm: f64,
}

/// Clearances at the crossing point, m.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoopnavClearances {
    pub d_h: f64,
    pub d_oh: f64,
    pub d_or: f64,
    pub d_hr: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoopnavPredicates {
    pub human_needs_to_contribute: bool,
    pub human_is_constrained: bool,
    pub robot_is_constrained: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoopnavCue {
    pub kind: CoopnavCueKind,
    /// Meaningful only when `has_direction` is true.
    pub direction: CoopnavDirection,
    pub has_direction: bool,
}

/// Opaque contribution recorder.
pub struct CoopnavRecorder {
    inner: ContributionRecord,
}

/// Opaque result of a scenario run.
pub struct CoopnavRun {
    inner: RunTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: CoopnavStatus, msg: impl Into<String>) -> CoopnavStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> CoopnavStatus {
    let status = match e {
        Error::NoObservations => CoopnavStatus::NoObservations,
        Error::Config { .. } | Error::TraceParse { .. } => CoopnavStatus::Config,
        Error::PlanningFailed { .. } | Error::UnreachableGoal => CoopnavStatus::Planning,
        Error::Io { .. } | Error::MissingCaSeries(_) => CoopnavStatus::Io,
        _ => CoopnavStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> CoopnavStatus) -> CoopnavStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(CoopnavStatus::Internal, "internal panic"))
}

/// Message describing the last failure on this thread, or NULL. Valid
/// until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn coopnav_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn coopnav_thresholds_default() -> CoopnavThresholds {
    let t = Thresholds::default();
    CoopnavThresholds {
        tau_h: t.tau_h,
        tau_oh: t.tau_oh,
        tau_or: t.tau_or,
        tau_hr: t.tau_hr,
        gamma: t.gamma,
        tau_cm: t.tau_cm,
    }
}

fn thresholds(t: &CoopnavThresholds) -> Thresholds {
    Thresholds {
        tau_h: t.tau_h,
        tau_oh: t.tau_oh,
        tau_or: t.tau_or,
        tau_hr: t.tau_hr,
        gamma: t.gamma,
        tau_cm: t.tau_cm,
    }
}

/// Creates an empty recorder with discount factor `gamma` in (0, 1).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn coopnav_recorder_new(gamma: f64, out: *mut *mut CoopnavRecorder) -> CoopnavStatus {
    guard(|| {
        if out.is_null() {
            return fail(CoopnavStatus::NullPointer, "out is null");
        }
        match ContributionRecord::new(gamma) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(CoopnavRecorder { inner }));
                CoopnavStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `rec` must be NULL or a handle from [`coopnav_recorder_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn coopnav_recorder_free(rec: *mut CoopnavRecorder) {
    if !rec.is_null() {
        drop(Box::from_raw(rec));
    }
}

/// Appends one signed contribution value.
///
/// # Safety
/// `rec` must be a live recorder handle.
#[no_mangle]
pub unsafe extern "C" fn coopnav_recorder_push(rec: *mut CoopnavRecorder, value: f64) -> CoopnavStatus {
    guard(|| {
        let Some(rec) = rec.as_mut() else {
            return fail(CoopnavStatus::NullPointer, "recorder is null");
        };
        match rec.inner.push(value) {
            Ok(()) => CoopnavStatus::Ok,
            Err(e) => from_error(&e),
        }
    })
}

/// Records the signed deviation of the human at `(hx, hy)` from the path
/// given as `n_points` interleaved `x, y` pairs, signed by the robot's side.
/// The value is written to `out_value` when it is not NULL.
///
/// # Safety
/// `rec` must be a live recorder handle; `path_xy` must point to
/// `2 * n_points` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn coopnav_recorder_record(
    rec: *mut CoopnavRecorder,
    hx: f64,
    hy: f64,
    path_xy: *const f64,
    n_points: usize,
    rx: f64,
    ry: f64,
    out_value: *mut f64,
) -> CoopnavStatus {
    guard(|| {
        let Some(rec) = rec.as_mut() else {
            return fail(CoopnavStatus::NullPointer, "recorder is null");
        };
        if path_xy.is_null() {
            return fail(CoopnavStatus::NullPointer, "path is null");
        }
        if n_points == 0 {
            return fail(CoopnavStatus::InvalidArgument, "path needs at least one point");
        }
        let raw = std::slice::from_raw_parts(path_xy, 2 * n_points);
        let pts: Vec<Vec2> = raw.chunks_exact(2).map(|c| Vec2::new(c[0], c[1])).collect();
        let heading = if pts.len() > 1 {
            let d = pts[pts.len() - 1] - pts[0];
            d.y.atan2(d.x)
        } else {
            0.0
        };
        let path = match Band::from_positions(&pts, heading, 1.0, 0.0) {
            Ok(b) => b,
            Err(e) => return from_error(&e),
        };
        let v = signed_contribution(Vec2::new(hx, hy), &path, Vec2::new(rx, ry));
        if let Err(e) = rec.inner.push(v) {
            return from_error(&e);
        }
        rec.inner.robot_side_reference = Some(Vec2::new(rx, ry));
        if let Some(o) = out_value.as_mut() {
            *o = v;
        }
        CoopnavStatus::Ok
    })
}

/// # Safety
/// `rec` must be a live recorder handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_recorder_len(rec: *const CoopnavRecorder, out: *mut usize) -> CoopnavStatus {
    guard(|| match (rec.as_ref(), out.as_mut()) {
        (Some(r), Some(o)) => {
            *o = r.inner.len();
            CoopnavStatus::Ok
        }
        _ => fail(CoopnavStatus::NullPointer, "null argument"),
    })
}

/// Discounted mean of the recorded series; `NoObservations` when empty.
///
/// # Safety
/// `rec` must be a live recorder handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_recorder_metric(rec: *const CoopnavRecorder, out: *mut f64) -> CoopnavStatus {
    guard(|| match (rec.as_ref(), out.as_mut()) {
        (Some(r), Some(o)) => match contribution_metric(&r.inner) {
            Ok(v) => {
                *o = v;
                CoopnavStatus::Ok
            }
            Err(e) => from_error(&e),
        },
        _ => fail(CoopnavStatus::NullPointer, "null argument"),
    })
}

/// Empties the series, keeping gamma.
///
/// # Safety
/// `rec` must be a live recorder handle.
#[no_mangle]
pub unsafe extern "C" fn coopnav_recorder_reset(rec: *mut CoopnavRecorder) -> CoopnavStatus {
    guard(|| match rec.as_mut() {
        Some(r) => {
            r.inner = coopnav::assessor::reset_recorder(&r.inner);
            CoopnavStatus::Ok
        }
        None => fail(CoopnavStatus::NullPointer, "recorder is null"),
    })
}

/// Discounted mean of `n` values for any `gamma > 0`.
///
/// # Safety
/// `values` must point to `n` readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_discounted_mean(values: *const f64, n: usize, gamma: f64, out: *mut f64) -> CoopnavStatus {
    guard(|| {
        if values.is_null() || out.is_null() {
            return fail(CoopnavStatus::NullPointer, "null argument");
        }
        match discounted_mean(std::slice::from_raw_parts(values, n), gamma) {
            Ok(v) => {
                *out = v;
                CoopnavStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Evaluates the three situation predicates.
///
/// # Safety
/// All pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_assess_situation(
    clearances: *const CoopnavClearances,
    th: *const CoopnavThresholds,
    out: *mut CoopnavPredicates,
) -> CoopnavStatus {
    guard(|| {
        let (Some(c), Some(t), Some(o)) = (clearances.as_ref(), th.as_ref(), out.as_mut()) else {
            return fail(CoopnavStatus::NullPointer, "null argument");
        };
        let info = CrossingInfo {
            i_star: 0,
            t_cross: 0.0,
            cp_h: Vec2::ZERO,
            cp_r: Vec2::ZERO,
            dir: Direction::Left,
            d_h: c.d_h,
            d_oh: c.d_oh,
            d_or: c.d_or,
            d_hr: c.d_hr,
        };
        let p = assess_situation(&info, &thresholds(t));
        *o = CoopnavPredicates {
            human_needs_to_contribute: p.human_needs_to_contribute,
            human_is_constrained: p.human_is_constrained,
            robot_is_constrained: p.robot_is_constrained,
        };
        CoopnavStatus::Ok
    })
}

fn cue(kind: CueKind) -> CoopnavCue {
    let k = match kind {
        CueKind::InformDirection(_) => CoopnavCueKind::InformDirection,
        CueKind::InformConstrainedSuggestDirection(_) => CoopnavCueKind::InformConstrainedSuggestDirection,
        CueKind::IndicateWillDockIfNeeded => CoopnavCueKind::IndicateWillDockIfNeeded,
        CueKind::AskMoveMore => CoopnavCueKind::AskMoveMore,
        CueKind::DockToWall => CoopnavCueKind::DockToWall,
        CueKind::ThankYou => CoopnavCueKind::ThankYou,
        CueKind::Silent => CoopnavCueKind::Silent,
    };
    let dir = kind.direction();
    CoopnavCue {
        kind: k,
        direction: match dir {
            Some(Direction::Right) => CoopnavDirection::Right,
            _ => CoopnavDirection::Left,
        },
        has_direction: dir.is_some(),
    }
}

/// The cue the first checkpoint emits for the given predicates.
///
/// # Safety
/// `preds` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_first_checkpoint(
    preds: *const CoopnavPredicates,
    direction: CoopnavDirection,
    out: *mut CoopnavCue,
) -> CoopnavStatus {
    guard(|| {
        let (Some(p), Some(o)) = (preds.as_ref(), out.as_mut()) else {
            return fail(CoopnavStatus::NullPointer, "null argument");
        };
        let preds = SituationPredicates {
            human_needs_to_contribute: p.human_needs_to_contribute,
            human_is_constrained: p.human_is_constrained,
            robot_is_constrained: p.robot_is_constrained,
        };
        let dir = match direction {
            CoopnavDirection::Left => Direction::Left,
            CoopnavDirection::Right => Direction::Right,
        };
        *o = cue(first_checkpoint_cue(&preds, dir));
        CoopnavStatus::Ok
    })
}

unsafe fn run_from_text(text: Result<String, CoopnavStatus>, out: *mut *mut CoopnavRun) -> CoopnavStatus {
    if out.is_null() {
        return fail(CoopnavStatus::NullPointer, "out is null");
    }
    let text = match text {
        Ok(t) => t,
        Err(s) => return s,
    };
    let trace = load_config(&text, &[]).and_then(|cfg| run_scenario(&cfg));
    match trace {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CoopnavRun { inner }));
            CoopnavStatus::Ok
        }
        Err(e) => from_error(&e),
    }
}

unsafe fn c_str<'a>(s: *const c_char) -> Result<&'a str, CoopnavStatus> {
    if s.is_null() {
        return Err(fail(CoopnavStatus::NullPointer, "string is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(CoopnavStatus::InvalidArgument, "string is not UTF-8"))
}

/// Runs the scenario described by a TOML config string.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_run_config(config_toml: *const c_char, out: *mut *mut CoopnavRun) -> CoopnavStatus {
    guard(|| run_from_text(c_str(config_toml).map(str::to_owned), out))
}

/// Runs one of the built-in scenarios (`open_minimal`, `open_facilitating`,
/// `narrow_minimal`, `narrow_facilitating`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_run_builtin(name: *const c_char, out: *mut *mut CoopnavRun) -> CoopnavStatus {
    guard(|| {
        let text = c_str(name).and_then(|n| {
            builtin_scenario(n)
                .map(str::to_owned)
                .ok_or_else(|| fail(CoopnavStatus::InvalidArgument, format!("no built-in scenario named `{n}`")))
        });
        run_from_text(text, out)
    })
}

/// # Safety
/// `run` must be NULL or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn coopnav_run_free(run: *mut CoopnavRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// # Safety
/// `run` must be a live run handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_run_final_cm(run: *const CoopnavRun, out: *mut f64) -> CoopnavStatus {
    guard(|| match (run.as_ref(), out.as_mut()) {
        (Some(r), Some(o)) => {
            *o = r.inner.final_cm;
            CoopnavStatus::Ok
        }
        _ => fail(CoopnavStatus::NullPointer, "null argument"),
    })
}

/// # Safety
/// `run` must be a live run handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_run_timed_out(run: *const CoopnavRun, out: *mut bool) -> CoopnavStatus {
    guard(|| match (run.as_ref(), out.as_mut()) {
        (Some(r), Some(o)) => {
            *o = r.inner.timed_out;
            CoopnavStatus::Ok
        }
        _ => fail(CoopnavStatus::NullPointer, "null argument"),
    })
}

fn into_c_string(s: String, out: *mut *mut c_char) -> CoopnavStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for NULL first
            unsafe { *out = c.into_raw() };
            CoopnavStatus::Ok
        }
        Err(_) => fail(CoopnavStatus::Internal, "output contains a NUL byte"),
    }
}

/// The run's cue events as a JSON array. Free with [`coopnav_string_free`].
///
/// # Safety
/// `run` must be a live run handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_run_events_json(run: *const CoopnavRun, out: *mut *mut c_char) -> CoopnavStatus {
    guard(|| match run.as_ref() {
        Some(r) if !out.is_null() => match serde_json::to_string(&r.inner.events) {
            Ok(s) => into_c_string(s, out),
            Err(e) => fail(CoopnavStatus::Internal, e.to_string()),
        },
        _ => fail(CoopnavStatus::NullPointer, "null argument"),
    })
}

/// The full run trace as JSON lines. Free with [`coopnav_string_free`].
///
/// # Safety
/// `run` must be a live run handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn coopnav_run_trace_jsonl(run: *const CoopnavRun, out: *mut *mut c_char) -> CoopnavStatus {
    guard(|| match run.as_ref() {
        Some(r) if !out.is_null() => into_c_string(trace_to_string(&r.inner), out),
        _ => fail(CoopnavStatus::NullPointer, "null argument"),
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn coopnav_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
