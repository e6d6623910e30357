//! Exercise the C ABI the way a foreign caller would: through raw pointers
//! and status codes only.

use std::ffi::{c_double, c_int, CStr};
use ymss_ffi::*;

#[test]
fn analyze_and_read_back_d11() {
    let mut handle: *mut YmssCase = std::ptr::null_mut();
    let st = ymss_analyze(11, &mut handle);
    assert_eq!(st, YmssStatus::Ok);
    assert!(!handle.is_null());

    assert_eq!(ymss_case_dimension(handle), 11);
    assert_eq!(ymss_case_root_count(handle), 3);
    assert_eq!(ymss_case_division_exact(handle), 1);
    assert_eq!(ymss_case_sign_pattern_ok(handle), 1);
    assert_eq!(ymss_case_unique_zero(handle), 1);
    assert_eq!(ymss_case_pass(handle), 1);
    assert_eq!(ymss_case_ordering(handle), 1); // z- < z* < z+

    let (mut lo, mut hi): (c_double, c_double) = (0.0, 0.0);
    assert_eq!(ymss_case_zstar(handle, &mut lo, &mut hi), YmssStatus::Ok);
    assert!((lo - 1.0 / 21.0).abs() < 1e-12 && (hi - 1.0 / 21.0).abs() < 1e-12);
    assert!(lo <= hi);

    let json = ymss_case_json(handle);
    assert!(!json.is_null());
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap();
    assert!(text.contains("\"n_roots\": 3"));
    assert!(text.contains("MINUS_STAR_PLUS"));
    unsafe { ymss_string_free(json) };

    unsafe { ymss_case_free(handle) };
}

#[test]
fn invalid_dimension_reports_error_message() {
    let mut handle: *mut YmssCase = std::ptr::null_mut();
    let st = ymss_analyze(12, &mut handle);
    assert_eq!(st, YmssStatus::DerivationFailed);
    assert!(handle.is_null());
    let msg = ymss_last_error_message();
    assert!(!msg.is_null());
    let text = unsafe { CStr::from_ptr(msg) }.to_str().unwrap().to_string();
    assert!(text.contains("even"), "message: {text}");
    unsafe { ymss_string_free(msg) };
}

#[test]
fn count_roots_matches_library() {
    let mut n: c_int = -1;
    assert_eq!(ymss_count_roots(9, &mut n), YmssStatus::Ok);
    assert_eq!(n, 2);
    assert_eq!(ymss_count_roots(19, &mut n), YmssStatus::Ok);
    assert_eq!(n, 3);
}

#[test]
fn null_pointers_are_rejected() {
    assert_eq!(ymss_analyze(11, std::ptr::null_mut()), YmssStatus::NullPointer);
    assert_eq!(ymss_case_dimension(std::ptr::null()), -1);
    assert_eq!(ymss_case_ordering(std::ptr::null()), 0);
    let mut x: c_double = 0.0;
    assert_eq!(
        ymss_case_astar(std::ptr::null(), &mut x),
        YmssStatus::NullPointer
    );
    unsafe { ymss_case_free(std::ptr::null_mut()) };
    unsafe { ymss_string_free(std::ptr::null_mut()) };
}

#[test]
fn find_astar_through_the_abi() {
    let mut a: c_double = 0.0;
    // c* = sqrt(1/21) for d = 11
    let c_target = (1.0f64 / 21.0).sqrt();
    let st = ymss_find_astar(11, c_target, 1e-6, &mut a);
    assert_eq!(st, YmssStatus::Ok);
    assert!((a - 3.6366965745490466).abs() < 1e-4, "a* = {a}");
    assert_eq!(
        ymss_find_astar(11, 1.5, 0.0, &mut a),
        YmssStatus::InvalidArgument
    );
}

#[test]
fn shooting_attachment_roundtrip() {
    let mut handle: *mut YmssCase = std::ptr::null_mut();
    let st = ymss_analyze_with_shooting(11, 1e-10, 0.0, 1e-6, &mut handle);
    assert_eq!(st, YmssStatus::Ok);
    let mut a: c_double = 0.0;
    assert_eq!(ymss_case_astar(handle, &mut a), YmssStatus::Ok);
    assert!((a - 3.6366965745490466).abs() < 1e-4, "a* = {a}");
    unsafe { ymss_case_free(handle) };
}

#[test]
fn astar_not_available_without_shooting() {
    let mut handle: *mut YmssCase = std::ptr::null_mut();
    assert_eq!(ymss_analyze(11, &mut handle), YmssStatus::Ok);
    let mut a: c_double = 0.0;
    assert_eq!(ymss_case_astar(handle, &mut a), YmssStatus::NotAvailable);
    unsafe { ymss_case_free(handle) };
}
