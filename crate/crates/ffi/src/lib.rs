//! C ABI for the platoon scheduling solvers.
//!
//! Instances and schedules are opaque handles created from the same JSON
//! formats the CLI uses. Every function returns a [`PsStatus`]; on any
//! status other than `Ok`, [`ps_last_error`] describes the failure for
//! the current thread. Strings returned through `char **` out-parameters
//! are owned by the caller and must be released with [`ps_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use platoon_sched::decide::{DecideError, Decider};
use platoon_sched::hardness::{extract_partition, reduce_partition, Reduction, ReductionError};
use platoon_sched::model::{
    generate_instance, Instance, ModelError, Schedule, Time, Topology, TopologyKind,
};
use platoon_sched::oracle::{brute_force_optimal, OracleError};
use platoon_sched::search::{decide_at, minimize_delay, SearchError, Strategy};
use platoon_sched::validate::check_valid;

/// Outcome of an FFI call. `Ok`, `Infeasible`, `InvalidSchedule`, and
/// `NoPartition` are ordinary results; everything else is an error with
/// details available from `ps_last_error`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    /// No schedule within the requested delay bound.
    Infeasible = 1,
    /// The schedule violates a validity condition.
    InvalidSchedule = 2,
    /// The multiset admits no equal-sum split (or the schedule's delay
    /// exceeds the reduction threshold, certifying nothing).
    NoPartition = 3,
    NullArgument = 4,
    InvalidArgument = 5,
    ParseError = 6,
    /// The requested procedure does not apply to this topology.
    Unsupported = 7,
    /// A work cap (state space or admission orders) was exceeded.
    CapExceeded = 8,
    InternalError = 9,
}

/// Opaque scheduling problem handle.
pub struct PsInstance {
    inner: Instance,
}

/// Opaque schedule handle.
pub struct PsSchedule {
    inner: Schedule,
}

/// Algorithm selector for `ps_decide`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsAlgorithm {
    /// Pick by topology: greedy for the two-lane merge, the merge DP for
    /// wider merges, the phase DP for the crossing.
    Auto = 0,
    Greedy = 1,
    MergeDp = 2,
    CrossingDp = 3,
}

/// Search strategy for `ps_solve`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsStrategy {
    Hybrid = 0,
    Bisect = 1,
    Comparison = 2,
}

/// Topology selector for `ps_instance_generate`. Pass `k = 0` for the
/// kinds that take no lane count.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsTopologyKind {
    YMerge = 0,
    KMerge = 1,
    TwoWayCrossing = 2,
    MultiCross = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

/// Message for the current thread's most recent non-`Ok` status, or null.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ps_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

fn model_status(err: &ModelError) -> PsStatus {
    match err {
        ModelError::Parse(_) => PsStatus::ParseError,
        _ => PsStatus::InvalidArgument,
    }
}

fn decide_status(err: &DecideError) -> PsStatus {
    match err {
        DecideError::WrongTopology { .. } | DecideError::Unsupported(_) => PsStatus::Unsupported,
        DecideError::StateSpaceTooLarge { .. } => PsStatus::CapExceeded,
        DecideError::Probe(_) => PsStatus::InternalError,
    }
}

fn fail(status: PsStatus, err: impl std::fmt::Display) -> PsStatus {
    set_error(err.to_string());
    status
}

/// Runs `body` with panics converted to `InternalError` and the error
/// slot cleared on entry.
fn guard(body: impl FnOnce() -> PsStatus) -> PsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            PsStatus::InternalError
        }
    }
}

/// # Safety
/// `ptr` must be non-null and point to a NUL-terminated UTF-8 string.
unsafe fn utf8_in<'a>(ptr: *const c_char) -> Result<&'a str, PsStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(PsStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        PsStatus::InvalidArgument
    })
}

fn string_out(out: *mut *mut c_char, text: String) -> PsStatus {
    match CString::new(text) {
        Ok(owned) => {
            unsafe { *out = owned.into_raw() };
            PsStatus::Ok
        }
        Err(_) => {
            set_error("output contained an interior NUL byte");
            PsStatus::InternalError
        }
    }
}

macro_rules! require {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_error(concat!("null argument: ", stringify!($ptr)));
            return PsStatus::NullArgument;
        }
    };
}

/// Parses an instance from its JSON format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_instance_from_json(
    json: *const c_char,
    out: *mut *mut PsInstance,
) -> PsStatus {
    guard(|| {
        require!(out);
        let text = match utf8_in(json) {
            Ok(text) => text,
            Err(status) => return status,
        };
        match Instance::from_json(text.as_bytes()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PsInstance { inner }));
                PsStatus::Ok
            }
            Err(err) => fail(model_status(&err), err),
        }
    })
}

/// Serializes an instance to its canonical JSON format.
///
/// # Safety
/// `inst` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_instance_to_json(
    inst: *const PsInstance,
    out: *mut *mut c_char,
) -> PsStatus {
    guard(|| {
        require!(inst);
        require!(out);
        let json = String::from_utf8((*inst).inner.to_json()).expect("JSON is UTF-8");
        string_out(out, json)
    })
}

/// Deterministically generates a random instance. `k` is required
/// (non-zero) for `KMerge` and `MultiCross` and must be zero otherwise.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_instance_generate(
    kind: PsTopologyKind,
    k: u32,
    n: u32,
    seed: u64,
    max_release: i64,
    max_length: i64,
    out: *mut *mut PsInstance,
) -> PsStatus {
    guard(|| {
        require!(out);
        let kind = match kind {
            PsTopologyKind::YMerge => TopologyKind::YMerge,
            PsTopologyKind::KMerge => TopologyKind::KMerge,
            PsTopologyKind::TwoWayCrossing => TopologyKind::TwoWayCrossing,
            PsTopologyKind::MultiCross => TopologyKind::MultiCross,
        };
        let topology = match Topology::new(kind, (k != 0).then_some(k)) {
            Ok(t) => t,
            Err(err) => return fail(PsStatus::InvalidArgument, err),
        };
        match generate_instance(
            &topology,
            n,
            seed,
            Time::new(max_release),
            Time::new(max_length),
        ) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PsInstance { inner }));
                PsStatus::Ok
            }
            Err(err) => fail(PsStatus::InvalidArgument, err),
        }
    })
}

/// Releases an instance handle. Null is ignored.
///
/// # Safety
/// `inst` must have been returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_instance_free(inst: *mut PsInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Parses a schedule from its JSON format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_schedule_from_json(
    json: *const c_char,
    out: *mut *mut PsSchedule,
) -> PsStatus {
    guard(|| {
        require!(out);
        let text = match utf8_in(json) {
            Ok(text) => text,
            Err(status) => return status,
        };
        match Schedule::from_json(text.as_bytes()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(PsSchedule { inner }));
                PsStatus::Ok
            }
            Err(err) => fail(model_status(&err), err),
        }
    })
}

/// Serializes a schedule to its JSON format.
///
/// # Safety
/// `sched` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_schedule_to_json(
    sched: *const PsSchedule,
    out: *mut *mut c_char,
) -> PsStatus {
    guard(|| {
        require!(sched);
        require!(out);
        let json = String::from_utf8((*sched).inner.to_json()).expect("JSON is UTF-8");
        string_out(out, json)
    })
}

/// Releases a schedule handle. Null is ignored.
///
/// # Safety
/// `sched` must have been returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_schedule_free(sched: *mut PsSchedule) {
    if !sched.is_null() {
        drop(Box::from_raw(sched));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must have been returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn select_decider(inst: &Instance, algorithm: PsAlgorithm) -> Result<Decider, DecideError> {
    match algorithm {
        PsAlgorithm::Auto => Decider::auto(inst.topology()),
        PsAlgorithm::Greedy => Ok(Decider::GreedyY),
        PsAlgorithm::MergeDp => Ok(Decider::MergeDp),
        PsAlgorithm::CrossingDp => Ok(Decider::CrossingDp),
    }
}

/// Tests whether a schedule with delay at most `delay` exists. On `Ok`,
/// `schedule_out` (if non-null) receives a witness schedule.
///
/// # Safety
/// `inst` must be a live handle; `schedule_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ps_decide(
    inst: *const PsInstance,
    delay: i64,
    algorithm: PsAlgorithm,
    schedule_out: *mut *mut PsSchedule,
) -> PsStatus {
    guard(|| {
        require!(inst);
        let inst = &(*inst).inner;
        let decider = match select_decider(inst, algorithm) {
            Ok(d) => d,
            Err(err) => return fail(decide_status(&err), err),
        };
        match decide_at(inst, decider, Time::new(delay)) {
            Ok(platoon_sched::Outcome::Feasible(schedule)) => {
                if !schedule_out.is_null() {
                    *schedule_out = Box::into_raw(Box::new(PsSchedule { inner: schedule }));
                }
                PsStatus::Ok
            }
            Ok(platoon_sched::Outcome::Infeasible) => PsStatus::Infeasible,
            Err(err) => fail(decide_status(&err), err),
        }
    })
}

/// Computes the minimum achievable delay. On `Ok`, writes it to
/// `d_star_out` and (if non-null) a witness schedule to `schedule_out`.
///
/// # Safety
/// `inst` must be a live handle; `d_star_out` must be valid;
/// `schedule_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ps_solve(
    inst: *const PsInstance,
    strategy: PsStrategy,
    d_star_out: *mut i64,
    schedule_out: *mut *mut PsSchedule,
) -> PsStatus {
    guard(|| {
        require!(inst);
        require!(d_star_out);
        let inst = &(*inst).inner;
        let decider = match Decider::auto(inst.topology()) {
            Ok(d) => d,
            Err(err) => return fail(decide_status(&err), err),
        };
        let strategy = match strategy {
            PsStrategy::Hybrid => Strategy::Hybrid,
            PsStrategy::Bisect => Strategy::Bisect,
            PsStrategy::Comparison => Strategy::Comparison,
        };
        match minimize_delay(inst, decider, strategy) {
            Ok(solved) => {
                *d_star_out = solved.d_star.value();
                if !schedule_out.is_null() {
                    *schedule_out = Box::into_raw(Box::new(PsSchedule {
                        inner: solved.schedule,
                    }));
                }
                PsStatus::Ok
            }
            Err(SearchError::Decide(err)) => fail(decide_status(&err), err),
            Err(err @ SearchError::ContractViolation(_)) => fail(PsStatus::InternalError, err),
        }
    })
}

/// Brute-forces the exact optimum over all admission orders, refusing
/// above `max_orders` interleavings. Works on every topology.
///
/// # Safety
/// `inst` must be a live handle; `d_star_out` must be valid;
/// `schedule_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ps_oracle(
    inst: *const PsInstance,
    max_orders: u64,
    d_star_out: *mut i64,
    schedule_out: *mut *mut PsSchedule,
) -> PsStatus {
    guard(|| {
        require!(inst);
        require!(d_star_out);
        match brute_force_optimal(&(*inst).inner, max_orders) {
            Ok(optimal) => {
                *d_star_out = optimal.d_star.value();
                if !schedule_out.is_null() {
                    *schedule_out = Box::into_raw(Box::new(PsSchedule {
                        inner: optimal.schedule,
                    }));
                }
                PsStatus::Ok
            }
            Err(err @ OracleError::CapExceeded { .. }) => fail(PsStatus::CapExceeded, err),
            Err(err) => fail(PsStatus::InvalidArgument, err),
        }
    })
}

/// Validates a schedule. Returns `Ok` and writes the maximum delay when
/// valid; returns `InvalidSchedule` with the violations described by
/// `ps_last_error` otherwise.
///
/// # Safety
/// `inst` and `sched` must be live handles; `max_delay_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn ps_validate(
    inst: *const PsInstance,
    sched: *const PsSchedule,
    max_delay_out: *mut i64,
) -> PsStatus {
    guard(|| {
        require!(inst);
        require!(sched);
        let report = check_valid(&(*inst).inner, &(*sched).inner);
        match report.max_delay {
            Some(delay) => {
                if !max_delay_out.is_null() {
                    *max_delay_out = delay.value();
                }
                PsStatus::Ok
            }
            None => {
                let details: Vec<String> = report
                    .violations
                    .iter()
                    .map(|v| v.detail.clone())
                    .collect();
                set_error(details.join("; "));
                PsStatus::InvalidSchedule
            }
        }
    })
}

/// Builds the hard combined-intersection instance for a multiset of
/// positive integers. Returns `NoPartition` without an instance when the
/// total is odd.
///
/// # Safety
/// `entries` must point to `len` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_reduce_partition(
    entries: *const i64,
    len: usize,
    out: *mut *mut PsInstance,
) -> PsStatus {
    guard(|| {
        require!(entries);
        require!(out);
        let entries = std::slice::from_raw_parts(entries, len);
        match reduce_partition(entries) {
            Ok(Reduction::Instance { instance, .. }) => {
                *out = Box::into_raw(Box::new(PsInstance { inner: instance }));
                PsStatus::Ok
            }
            Ok(Reduction::TriviallyNoPartition { sum }) => {
                set_error(format!("multiset total {sum} is odd"));
                PsStatus::NoPartition
            }
            Err(err) => fail(PsStatus::InvalidArgument, err),
        }
    })
}

/// Recovers an equal-sum split from a schedule for a reduced instance,
/// as a JSON object `{"u": [...], "v": [...]}`. Returns `NoPartition`
/// when the schedule's delay exceeds the reduction threshold.
///
/// # Safety
/// `inst` and `sched` must be live handles; `json_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ps_extract_partition(
    inst: *const PsInstance,
    sched: *const PsSchedule,
    json_out: *mut *mut c_char,
) -> PsStatus {
    guard(|| {
        require!(inst);
        require!(sched);
        require!(json_out);
        let instance = &(*inst).inner;
        let Some(meta) = instance.meta() else {
            set_error("instance carries no reduction metadata");
            return PsStatus::InvalidArgument;
        };
        match extract_partition(meta, instance, &(*sched).inner) {
            Ok(Some((u, v))) => string_out(json_out, split_json(&u, &v)),
            Ok(None) => {
                set_error("schedule delay exceeds d_max; no split is certified");
                PsStatus::NoPartition
            }
            Err(err @ ReductionError::InvalidSchedule(_)) => fail(PsStatus::InvalidSchedule, err),
            Err(err @ ReductionError::UnbalancedExtraction(..)) => {
                fail(PsStatus::InternalError, err)
            }
            Err(err) => fail(PsStatus::InvalidArgument, err),
        }
    })
}

fn split_json(u: &[i64], v: &[i64]) -> String {
    fn list(values: &[i64]) -> String {
        let items: Vec<String> = values.iter().map(|x| x.to_string()).collect();
        format!("[{}]", items.join(","))
    }
    format!("{{\"u\":{},\"v\":{}}}", list(u), list(v))
}
