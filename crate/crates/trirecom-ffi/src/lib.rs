//! C interface to `trirecom`.
//!
//! Partitions and traces are opaque heap handles released with their
//! `_free` function. Every fallible call returns a [`TrStatus`] code; the
//! message of the last failure on the calling thread is available from
//! [`tr_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;
use trirecom::partition::ground_state;
use trirecom::{balance_class, path_with, verify_trace, BalanceClass, Granularity, Partition, RecomStep, SizeTargets, Trace, TriRegion};

/// Status codes returned by every fallible function.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutsideStateSpace = 3,
    PathFailed = 4,
    VerifyFailed = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque partition handle.
pub struct TrPartition {
    inner: Partition,
}

/// Opaque trace handle.
pub struct TrTrace {
    inner: Trace,
}

pub const TR_GRANULARITY_FLIP: i32 = 0;
pub const TR_GRANULARITY_RECOM: i32 = 1;

pub const TR_BALANCED: i32 = 0;
pub const TR_NEARLY_BALANCED: i32 = 1;
pub const TR_OUTSIDE: i32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
}

fn fail(status: TrStatus, msg: impl Into<String>) -> TrStatus {
    set_error(msg);
    status
}

fn guard(body: impl FnOnce() -> TrStatus) -> TrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == TrStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(TrStatus::Panic, "internal panic"),
    }
}

unsafe fn slice<'a, T>(data: *const T, len: usize) -> Option<&'a [T]> {
    if data.is_null() {
        (len == 0).then_some(&[])
    } else {
        Some(std::slice::from_raw_parts(data, len))
    }
}

fn instance(n: usize, k: &[usize; 3]) -> Result<(Arc<TriRegion>, SizeTargets), TrStatus> {
    let region = TriRegion::new(n).map_err(|e| fail(TrStatus::InvalidArgument, e.to_string()))?;
    let targets = SizeTargets::new(k[0], k[1], k[2]);
    targets.check(&region).map_err(|e| fail(TrStatus::InvalidArgument, e.to_string()))?;
    Ok((Arc::new(region), targets))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build a partition of the side-`n` region from `len` labels (1, 2 or 3) in
/// vertex order, with size targets `k[0..3]`.
///
/// # Safety
/// `k` must point to three values, `labels` to `len` values, and `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_partition_new(
    n: usize,
    k: *const usize,
    labels: *const u8,
    len: usize,
    out: *mut *mut TrPartition,
) -> TrStatus {
    guard(|| {
        if k.is_null() || out.is_null() {
            return fail(TrStatus::NullPointer, "null argument");
        }
        let Some(labels) = slice(labels, len) else {
            return fail(TrStatus::NullPointer, "null labels");
        };
        let k = &*(k as *const [usize; 3]);
        let (region, targets) = match instance(n, k) {
            Ok(x) => x,
            Err(s) => return s,
        };
        match Partition::new(region, labels.to_vec(), targets) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(TrPartition { inner: p }));
                TrStatus::Ok
            }
            Err(e) => fail(TrStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// The ground state whose blocks in vertex order are districts
/// `perm[0], perm[1], perm[2]`.
///
/// # Safety
/// `k` and `perm` must point to three values each; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_partition_ground(
    n: usize,
    k: *const usize,
    perm: *const u8,
    out: *mut *mut TrPartition,
) -> TrStatus {
    guard(|| {
        if k.is_null() || perm.is_null() || out.is_null() {
            return fail(TrStatus::NullPointer, "null argument");
        }
        let k = &*(k as *const [usize; 3]);
        let perm = *(perm as *const [u8; 3]);
        let (region, targets) = match instance(n, k) {
            Ok(x) => x,
            Err(s) => return s,
        };
        match ground_state(region, targets, perm) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(TrPartition { inner: p }));
                TrStatus::Ok
            }
            Err(e) => fail(TrStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tr_partition_free(p: *mut TrPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tr_partition_len(p: *const TrPartition) -> usize {
    p.as_ref().map_or(0, |p| p.inner.labels().len())
}

/// Copy the labels into `buf`, which must hold the partition's length.
///
/// # Safety
/// `p` must be a live handle and `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tr_partition_labels(p: *const TrPartition, buf: *mut u8, len: usize) -> TrStatus {
    guard(|| {
        let (Some(p), false) = (p.as_ref(), buf.is_null()) else {
            return fail(TrStatus::NullPointer, "null argument");
        };
        copy_labels(p.inner.labels(), buf, len)
    })
}

unsafe fn copy_labels(labels: &[u8], buf: *mut u8, len: usize) -> TrStatus {
    if len < labels.len() {
        return fail(TrStatus::BufferTooSmall, format!("need {} bytes, got {len}", labels.len()));
    }
    ptr::copy_nonoverlapping(labels.as_ptr(), buf, labels.len());
    TrStatus::Ok
}

/// One of `TR_BALANCED`, `TR_NEARLY_BALANCED`, `TR_OUTSIDE`, or -1 for a
/// null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tr_partition_balance_class(p: *const TrPartition) -> i32 {
    match p.as_ref() {
        None => -1,
        Some(p) => match balance_class(&p.inner) {
            BalanceClass::Balanced => TR_BALANCED,
            BalanceClass::NearlyBalanced => TR_NEARLY_BALANCED,
            BalanceClass::OutsideOmega => TR_OUTSIDE,
        },
    }
}

/// Build and verify a path from `from` to `to`.
///
/// # Safety
/// `from` and `to` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_path(
    from: *const TrPartition,
    to: *const TrPartition,
    granularity: i32,
    out: *mut *mut TrTrace,
) -> TrStatus {
    guard(|| {
        let (Some(from), Some(to), false) = (from.as_ref(), to.as_ref(), out.is_null()) else {
            return fail(TrStatus::NullPointer, "null argument");
        };
        let g = match granularity {
            TR_GRANULARITY_FLIP => Granularity::Flip,
            TR_GRANULARITY_RECOM => Granularity::Recom,
            other => return fail(TrStatus::InvalidArgument, format!("unknown granularity {other}")),
        };
        for (name, p) in [("source", &from.inner), ("target", &to.inner)] {
            if !balance_class(p).in_omega() {
                return fail(TrStatus::OutsideStateSpace, format!("{name} is outside the state space"));
            }
        }
        match path_with(&from.inner, &to.inner, g) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(TrTrace { inner: t }));
                TrStatus::Ok
            }
            Err(e) => fail(TrStatus::PathFailed, e.to_string()),
        }
    })
}

/// An empty trace starting at `source`, for assembling steps by hand.
///
/// # Safety
/// `source` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_trace_new(source: *const TrPartition, out: *mut *mut TrTrace) -> TrStatus {
    guard(|| {
        let (Some(source), false) = (source.as_ref(), out.is_null()) else {
            return fail(TrStatus::NullPointer, "null argument");
        };
        *out = Box::into_raw(Box::new(TrTrace { inner: Trace::empty(source.inner.clone()) }));
        TrStatus::Ok
    })
}

/// Append a step keeping district `untouched` fixed and ending at `labels`.
/// The step is not checked until [`tr_trace_verify`].
///
/// # Safety
/// `t` must be a live handle and `labels` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn tr_trace_push(t: *mut TrTrace, untouched: u8, labels: *const u8, len: usize) -> TrStatus {
    guard(|| {
        let (Some(t), Some(labels)) = (t.as_mut(), slice(labels, len)) else {
            return fail(TrStatus::NullPointer, "null argument");
        };
        if labels.len() != t.inner.source.labels().len() {
            return fail(TrStatus::InvalidArgument, format!("step has {} labels", labels.len()));
        }
        t.inner.push(RecomStep { untouched, after: labels.to_vec() }, "external");
        TrStatus::Ok
    })
}

/// # Safety
/// `t` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tr_trace_free(t: *mut TrTrace) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of steps, or 0 for a null handle.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tr_trace_len(t: *const TrTrace) -> usize {
    t.as_ref().map_or(0, |t| t.inner.len())
}

/// Read step `index`: the kept district and the labels after the step.
///
/// # Safety
/// `t` must be a live handle, `untouched` writable, and `buf` must point to
/// `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tr_trace_step(
    t: *const TrTrace,
    index: usize,
    untouched: *mut u8,
    buf: *mut u8,
    len: usize,
) -> TrStatus {
    guard(|| {
        let (Some(t), false, false) = (t.as_ref(), untouched.is_null(), buf.is_null()) else {
            return fail(TrStatus::NullPointer, "null argument");
        };
        let Some(step) = t.inner.steps.get(index) else {
            return fail(TrStatus::InvalidArgument, format!("step {index} of {}", t.inner.len()));
        };
        *untouched = step.untouched;
        copy_labels(&step.after, buf, len)
    })
}

/// Re-check every step from scratch. On failure `failing_index` (if not
/// null) receives the index of the first bad step, or `SIZE_MAX` when the
/// source itself is outside the state space.
///
/// # Safety
/// `t` must be a live handle; `failing_index` null or writable.
#[no_mangle]
pub unsafe extern "C" fn tr_trace_verify(t: *const TrTrace, failing_index: *mut usize) -> TrStatus {
    guard(|| {
        let Some(t) = t.as_ref() else {
            return fail(TrStatus::NullPointer, "null argument");
        };
        match verify_trace(&t.inner.source, &t.inner.steps) {
            Ok(_) => TrStatus::Ok,
            Err(e) => {
                if !failing_index.is_null() {
                    *failing_index = match e {
                        trirecom::VerifyError::Step { index, .. } => index,
                        trirecom::VerifyError::BadSource => usize::MAX,
                    };
                }
                fail(TrStatus::VerifyFailed, e.to_string())
            }
        }
    })
}
