use std::ffi::CStr;
use std::ptr;
use trirecom_ffi::*;

const K5: [usize; 3] = [5, 5, 5];

fn ground(perm: [u8; 3]) -> *mut TrPartition {
    let mut out = ptr::null_mut();
    let status = unsafe { tr_partition_ground(5, K5.as_ptr(), perm.as_ptr(), &mut out) };
    assert_eq!(status, TrStatus::Ok);
    out
}

fn labels(p: *const TrPartition) -> Vec<u8> {
    let len = unsafe { tr_partition_len(p) };
    let mut buf = vec![0u8; len];
    assert_eq!(unsafe { tr_partition_labels(p, buf.as_mut_ptr(), len) }, TrStatus::Ok);
    buf
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tr_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn ground_state_round_trips_through_labels() {
    let p = ground([1, 2, 3]);
    let l = labels(p);
    assert_eq!(l.len(), 15);
    assert_eq!(&l[..5], &[1; 5]);
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { tr_partition_new(5, K5.as_ptr(), l.as_ptr(), l.len(), &mut q) }, TrStatus::Ok);
    assert_eq!(labels(q), l);
    assert_eq!(unsafe { tr_partition_balance_class(q) }, TR_BALANCED);
    unsafe {
        tr_partition_free(p);
        tr_partition_free(q);
    }
}

#[test]
fn adjacent_transposition_is_one_step() {
    let a = ground([1, 2, 3]);
    let b = ground([2, 1, 3]);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { tr_path(a, b, TR_GRANULARITY_RECOM, &mut t) }, TrStatus::Ok);
    assert_eq!(unsafe { tr_trace_len(t) }, 1);
    let mut kept = 0u8;
    let mut buf = [0u8; 15];
    assert_eq!(unsafe { tr_trace_step(t, 0, &mut kept, buf.as_mut_ptr(), buf.len()) }, TrStatus::Ok);
    assert_eq!(kept, 3);
    assert_eq!(buf.to_vec(), labels(b));
    assert_eq!(unsafe { tr_trace_verify(t, ptr::null_mut()) }, TrStatus::Ok);
    unsafe {
        tr_trace_free(t);
        tr_partition_free(a);
        tr_partition_free(b);
    }
}

#[test]
fn flip_and_recom_paths_share_endpoints() {
    let a = ground([3, 1, 2]);
    let b = ground([2, 3, 1]);
    for g in [TR_GRANULARITY_FLIP, TR_GRANULARITY_RECOM] {
        let mut t = ptr::null_mut();
        assert_eq!(unsafe { tr_path(a, b, g, &mut t) }, TrStatus::Ok, "{}", last_error());
        let len = unsafe { tr_trace_len(t) };
        assert!(len >= 1);
        let mut kept = 0u8;
        let mut buf = [0u8; 15];
        unsafe { tr_trace_step(t, len - 1, &mut kept, buf.as_mut_ptr(), 15) };
        assert_eq!(buf.to_vec(), labels(b));
        unsafe { tr_trace_free(t) };
    }
    unsafe {
        tr_partition_free(a);
        tr_partition_free(b);
    }
}

#[test]
fn corrupted_step_fails_at_its_index() {
    let a = ground([1, 2, 3]);
    let b = ground([2, 1, 3]);
    let c = ground([2, 3, 1]);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { tr_trace_new(a, &mut t) }, TrStatus::Ok);
    let (lb, lc) = (labels(b), labels(c));
    unsafe {
        assert_eq!(tr_trace_push(t, 3, lb.as_ptr(), lb.len()), TrStatus::Ok);
        assert_eq!(tr_trace_push(t, 2, lc.as_ptr(), lc.len()), TrStatus::Ok);
        assert_eq!(tr_trace_verify(t, ptr::null_mut()), TrStatus::Ok);
        // The same step again changes nothing.
        assert_eq!(tr_trace_push(t, 2, lc.as_ptr(), lc.len()), TrStatus::Ok);
        let mut index = 0usize;
        assert_eq!(tr_trace_verify(t, &mut index), TrStatus::VerifyFailed);
        assert_eq!(index, 2);
        assert!(last_error().contains("step 2"), "{}", last_error());
        tr_trace_free(t);
        for p in [a, b, c] {
            tr_partition_free(p);
        }
    }
}

#[test]
fn bad_inputs_return_codes() {
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(tr_partition_ground(5, ptr::null(), [1, 2, 3].as_ptr(), &mut out), TrStatus::NullPointer);
        assert_eq!(tr_partition_ground(5, [5, 5, 4].as_ptr(), [1, 2, 3].as_ptr(), &mut out), TrStatus::InvalidArgument);
        assert_eq!(tr_partition_ground(5, K5.as_ptr(), [1, 1, 3].as_ptr(), &mut out), TrStatus::InvalidArgument);
        assert_eq!(tr_partition_new(5, K5.as_ptr(), [1u8; 3].as_ptr(), 3, &mut out), TrStatus::InvalidArgument);
        assert!(!last_error().is_empty());
        assert_eq!(tr_partition_len(ptr::null()), 0);
        assert_eq!(tr_partition_balance_class(ptr::null()), -1);
        tr_partition_free(ptr::null_mut());
        tr_trace_free(ptr::null_mut());
    }
    let p = ground([1, 2, 3]);
    let mut small = [0u8; 4];
    assert_eq!(unsafe { tr_partition_labels(p, small.as_mut_ptr(), 4) }, TrStatus::BufferTooSmall);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { tr_path(p, p, 9, &mut t) }, TrStatus::InvalidArgument);
    unsafe { tr_partition_free(p) };
}

#[test]
fn outside_state_space_is_refused() {
    // All of district 1 in the first column and district 3 split in two.
    let mut l = [2u8; 15];
    for v in [0, 1, 2, 3, 4] {
        l[v] = 1;
    }
    l[5] = 3;
    l[14] = 3;
    let mut p = ptr::null_mut();
    let k = [5, 8, 2];
    assert_eq!(unsafe { tr_partition_new(5, k.as_ptr(), l.as_ptr(), 15, &mut p) }, TrStatus::Ok);
    assert_eq!(unsafe { tr_partition_balance_class(p) }, TR_OUTSIDE);
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { tr_path(p, p, TR_GRANULARITY_RECOM, &mut t) }, TrStatus::OutsideStateSpace);
    unsafe { tr_partition_free(p) };
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/trirecom.h")).unwrap();
    for name in [
        "typedef struct TrPartition TrPartition;",
        "typedef struct TrTrace TrTrace;",
        "TR_STATUS_VERIFY_FAILED = 5",
        "tr_partition_new(",
        "tr_partition_ground(",
        "tr_path(",
        "tr_trace_verify(",
        "tr_last_error(void)",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
