//! C ABI over the exact analysis and shooting pipeline.
//!
//! All functions return a [`YmssStatus`] code; results come back through out
//! pointers. A case analysis produces an opaque [`YmssCase`] handle that must
//! be released with [`ymss_case_free`]. Strings returned by the library are
//! owned by the caller and released with [`ymss_string_free`]. The last error
//! message is kept per thread and fetched with [`ymss_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CString};
use ymss::real::{Dd, Real};
use ymss::roots::{CaseReport, RootOrdering};
use ymss::shoot::{analyze_with_shooting, find_astar, ShootConfig};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YmssStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DerivationFailed = 3,
    ShootingFailed = 4,
    NotAvailable = 5,
}

/// Opaque analysis record for one dimension.
pub struct YmssCase {
    report: CaseReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Copy of the most recent error message on this thread, or null.
/// The caller owns the string and must release it with `ymss_string_free`.
#[no_mangle]
pub extern "C" fn ymss_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(c) => c.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn ymss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Run the exact pipeline for odd dimension d and return an opaque handle.
#[no_mangle]
pub extern "C" fn ymss_analyze(d: c_int, out: *mut *mut YmssCase) -> YmssStatus {
    if out.is_null() {
        return YmssStatus::NullPointer;
    }
    match ymss::analyze_case(d as i64) {
        Ok(report) => {
            let handle = Box::new(YmssCase { report });
            unsafe { *out = Box::into_raw(handle) };
            YmssStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            YmssStatus::DerivationFailed
        }
    }
}

/// Run the exact pipeline and additionally construct the third solution
/// numerically (double-double working precision). Pass 0 for any tolerance
/// to keep its default (tol 1e-12, delta 1e-6, tol_c 1e-8).
#[no_mangle]
pub extern "C" fn ymss_analyze_with_shooting(
    d: c_int,
    tol: c_double,
    delta: c_double,
    tol_c: c_double,
    out: *mut *mut YmssCase,
) -> YmssStatus {
    if out.is_null() {
        return YmssStatus::NullPointer;
    }
    let mut cfg = ShootConfig::default();
    if tol > 0.0 {
        cfg.tol = tol;
    }
    if delta > 0.0 {
        cfg.delta = delta;
    }
    if tol_c > 0.0 {
        cfg.tol_c = tol_c;
    }
    match analyze_with_shooting::<Dd>(d as i64, &cfg) {
        Ok(report) => {
            let handle = Box::new(YmssCase { report });
            unsafe { *out = Box::into_raw(handle) };
            YmssStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            YmssStatus::ShootingFailed
        }
    }
}

/// Release a case handle.
///
/// # Safety
/// `case` must be a handle returned by an analyze call, or null.
#[no_mangle]
pub unsafe extern "C" fn ymss_case_free(case: *mut YmssCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

unsafe fn case_ref<'a>(case: *const YmssCase) -> Option<&'a CaseReport> {
    case.as_ref().map(|c| &c.report)
}

/// Dimension d of the case, or -1 for a null handle.
#[no_mangle]
pub extern "C" fn ymss_case_dimension(case: *const YmssCase) -> c_int {
    unsafe { case_ref(case) }.map_or(-1, |r| r.d as c_int)
}

/// Number of roots of P_m in (0,1), or -1 for a null handle.
#[no_mangle]
pub extern "C" fn ymss_case_root_count(case: *const YmssCase) -> c_int {
    unsafe { case_ref(case) }.map_or(-1, |r| r.n_roots as c_int)
}

/// 1 when the quadratic factor of the explicit roots divides P_m exactly.
#[no_mangle]
pub extern "C" fn ymss_case_division_exact(case: *const YmssCase) -> c_int {
    unsafe { case_ref(case) }.map_or(-1, |r| r.division_exact as c_int)
}

/// 1 when the coefficient sign pattern of S_m holds (positive leading,
/// all lower coefficients negative).
#[no_mangle]
pub extern "C" fn ymss_case_sign_pattern_ok(case: *const YmssCase) -> c_int {
    unsafe { case_ref(case) }.map_or(-1, |r| r.sign_pattern_ok as c_int)
}

/// 1 when S_m has exactly one root in (0,1).
#[no_mangle]
pub extern "C" fn ymss_case_unique_zero(case: *const YmssCase) -> c_int {
    unsafe { case_ref(case) }.map_or(-1, |r| r.unique_zero as c_int)
}

/// 1 when every hard internal-consistency check of the case passed.
#[no_mangle]
pub extern "C" fn ymss_case_pass(case: *const YmssCase) -> c_int {
    unsafe { case_ref(case) }.map_or(-1, |r| r.pass as c_int)
}

/// Ordering of z* against the explicit pair z-: 1 for z- < z* < z+,
/// 2 for z* < z- < z+, 3 otherwise; 0 when no ordering was computed.
#[no_mangle]
pub extern "C" fn ymss_case_ordering(case: *const YmssCase) -> c_int {
    unsafe { case_ref(case) }.map_or(0, |r| match r.ordering {
        Some(RootOrdering::MinusStarPlus) => 1,
        Some(RootOrdering::StarMinusPlus) => 2,
        Some(RootOrdering::Other) => 3,
        None => 0,
    })
}

/// Rounded endpoints of the exact bracket around z*.
#[no_mangle]
pub extern "C" fn ymss_case_zstar(
    case: *const YmssCase,
    lo: *mut c_double,
    hi: *mut c_double,
) -> YmssStatus {
    if case.is_null() || lo.is_null() || hi.is_null() {
        return YmssStatus::NullPointer;
    }
    let report = unsafe { case_ref(case) }.expect("checked");
    match report.zstar() {
        Some(iv) => {
            unsafe {
                *lo = ymss::exact::to_f64_nearest(&iv.lo);
                *hi = ymss::exact::to_f64_nearest(&iv.hi);
            }
            YmssStatus::Ok
        }
        None => YmssStatus::NotAvailable,
    }
}

/// Converged shooting parameter of the third solution, when attached.
#[no_mangle]
pub extern "C" fn ymss_case_astar(case: *const YmssCase, out: *mut c_double) -> YmssStatus {
    if case.is_null() || out.is_null() {
        return YmssStatus::NullPointer;
    }
    let report = unsafe { case_ref(case) }.expect("checked");
    match &report.shoot {
        Some(s) => {
            unsafe { *out = s.astar };
            YmssStatus::Ok
        }
        None => YmssStatus::NotAvailable,
    }
}

/// Full case record as a JSON document. The caller owns the string.
#[no_mangle]
pub extern "C" fn ymss_case_json(case: *const YmssCase) -> *mut c_char {
    match unsafe { case_ref(case) } {
        Some(r) => match serde_json::to_string_pretty(r) {
            Ok(s) => CString::new(s).map(CString::into_raw).unwrap_or(std::ptr::null_mut()),
            Err(e) => {
                set_error(e.to_string());
                std::ptr::null_mut()
            }
        },
        None => std::ptr::null_mut(),
    }
}

/// One-shot root count for odd dimension d.
#[no_mangle]
pub extern "C" fn ymss_count_roots(d: c_int, out: *mut c_int) -> YmssStatus {
    if out.is_null() {
        return YmssStatus::NullPointer;
    }
    match ymss::count_n(d as i64) {
        Ok(n) => {
            unsafe { *out = n as c_int };
            YmssStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            YmssStatus::DerivationFailed
        }
    }
}

/// Shooting parameter with c(a) = c_target, double-double working precision.
/// Pass 0 for tol_c to keep the default 1e-8.
#[no_mangle]
pub extern "C" fn ymss_find_astar(
    d: c_int,
    c_target: c_double,
    tol_c: c_double,
    out: *mut c_double,
) -> YmssStatus {
    if out.is_null() {
        return YmssStatus::NullPointer;
    }
    if !(0.0..1.0).contains(&c_target) || c_target == 0.0 {
        return YmssStatus::InvalidArgument;
    }
    let mut cfg = ShootConfig::default();
    if tol_c > 0.0 {
        cfg.tol_c = tol_c;
    }
    match find_astar::<Dd>(d as i64, Dd::of(c_target), &cfg) {
        Ok(astar) => {
            unsafe { *out = astar.a.to_f64_lossy() };
            YmssStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            YmssStatus::ShootingFailed
        }
    }
}
