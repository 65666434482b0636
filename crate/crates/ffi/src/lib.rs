//! C interface to `conebessel`.
//!
//! Every fallible function returns a [`ConebesselStatus`]. When the status is
//! not `OK` a message describing the failure can be read with
//! [`conebessel_last_error`] on the same thread; it stays valid until the
//! next failing call on that thread. Successful calls leave it untouched.
//!
//! Handles (`ConebesselParams`, `ConebesselReport`) are opaque. Each is
//! created by exactly one constructor and must be released with its `_free`
//! function. Panics never cross the boundary; they are reported as
//! `CONEBESSEL_STATUS_PANIC`.

use conebessel::algebra::{AlgebraDescriptor, Element};
use conebessel::cone::k_integral_mc;
use conebessel::series::{
    coeffs2, coeffs3, k_series_with, k_series_x, EvalResult, Flavor, KMethod, SeriesParams, Solution,
    SymmetricPoint,
};
use conebessel::verify::{run_suite, Report, Suite};
use conebessel::{json, Error};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConebesselStatus {
    Ok = 0,
    Usage = 1,
    UnsupportedAlgebra = 2,
    Singular = 3,
    Domain = 4,
    NotInCone = 5,
    NonGeneric = 6,
    NoConvergence = 7,
    IllConditioned = 8,
    Divergent = 9,
    NonFiniteWeight = 10,
    UnknownCheck = 11,
    NullPointer = 12,
    InvalidString = 13,
    Panic = 14,
}

/// Zero-order sign of the system a J-solution is evaluated for.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConebesselFlavor {
    Oscillatory = 0,
    Modified = 1,
}

/// A series value with its error estimate and the number of terms summed.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConebesselEval {
    pub value: f64,
    pub err: f64,
    pub work: u64,
}

/// A Monte Carlo estimate.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConebesselMc {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Numeric part of one verification result.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConebesselCheck {
    pub passed: bool,
    pub observed: f64,
    pub bound: f64,
    pub work: u64,
}

/// Order, Peirce constant, truncation tolerance and flavor.
pub struct ConebesselParams {
    series: SeriesParams,
    flavor: Flavor,
}

/// A finished verification run.
pub struct ConebesselReport {
    report: Report,
    names: Vec<CString>,
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    BadString(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ConebesselStatus {
    use ConebesselStatus as S;
    match e {
        Error::Usage(_) => S::Usage,
        Error::UnsupportedAlgebra { .. } => S::UnsupportedAlgebra,
        Error::Singular { .. } => S::Singular,
        Error::Domain(_) => S::Domain,
        Error::NotInCone { .. } => S::NotInCone,
        Error::NonGeneric { .. } => S::NonGeneric,
        Error::NoConvergence { .. } => S::NoConvergence,
        Error::IllConditioned(_) => S::IllConditioned,
        Error::Divergent(_) => S::Divergent,
        Error::NonFiniteWeight { .. } => S::NonFiniteWeight,
        Error::UnknownCheck { .. } => S::UnknownCheck,
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ConebesselStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ConebesselStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("{what} is null"));
            ConebesselStatus::NullPointer
        }
        Ok(Err(Failure::BadString(msg))) => {
            set_last_error(msg);
            ConebesselStatus::InvalidString
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            ConebesselStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a>(p: *const ConebesselParams) -> Result<&'a ConebesselParams, Failure> {
    p.as_ref().ok_or(Failure::Null("params"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn eval_out(r: EvalResult) -> ConebesselEval {
    ConebesselEval { value: r.value, err: r.err, work: r.work }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn conebessel_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the most recent failure on this thread, or NULL if none.
/// The pointer is owned by the library.
#[no_mangle]
pub extern "C" fn conebessel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates a parameter handle with the default tolerance and the oscillatory
/// flavor.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn conebessel_params_new(
    nu: f64,
    d: f64,
    out: *mut *mut ConebesselParams,
) -> ConebesselStatus {
    guard(|| {
        let series = SeriesParams::new(nu, d);
        series.validate()?;
        let handle = Box::into_raw(Box::new(ConebesselParams { series, flavor: Flavor::Oscillatory }));
        if out.is_null() {
            drop(Box::from_raw(handle));
            return Err(Failure::Null("out"));
        }
        out.write(handle);
        Ok(())
    })
}

/// Sets the series truncation tolerance.
///
/// # Safety
/// `params` must come from `conebessel_params_new` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn conebessel_params_set_tol(params: *mut ConebesselParams, tol: f64) -> ConebesselStatus {
    guard(|| {
        let p = params.as_mut().ok_or(Failure::Null("params"))?;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Usage(format!("tol must be positive, got {tol}")).into());
        }
        p.series.tol = tol;
        Ok(())
    })
}

/// Selects the flavor used by `conebessel_eval_j`.
///
/// # Safety
/// `params` must come from `conebessel_params_new` and not be freed.
#[no_mangle]
pub unsafe extern "C" fn conebessel_params_set_flavor(
    params: *mut ConebesselParams,
    flavor: ConebesselFlavor,
) -> ConebesselStatus {
    guard(|| {
        let p = params.as_mut().ok_or(Failure::Null("params"))?;
        p.flavor = match flavor {
            ConebesselFlavor::Oscillatory => Flavor::Oscillatory,
            ConebesselFlavor::Modified => Flavor::Modified,
        };
        Ok(())
    })
}

/// Releases a parameter handle. NULL is ignored.
///
/// # Safety
/// `params` must be NULL or come from `conebessel_params_new`, and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn conebessel_params_free(params: *mut ConebesselParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Evaluates J^{[rank,j]} (or its partner t_r^{-nu} J_{-nu}) at the
/// elementary symmetric coordinates `t[0..len]`.
///
/// # Safety
/// `params` must be a live handle, `t` must point to `len` doubles and `out`
/// to writable storage.
#[no_mangle]
pub unsafe extern "C" fn conebessel_eval_j(
    params: *const ConebesselParams,
    rank: usize,
    j: u8,
    partner: bool,
    t: *const f64,
    len: usize,
    out: *mut ConebesselEval,
) -> ConebesselStatus {
    guard(|| {
        let p = handle(params)?;
        let t = slice(t, len, "t")?;
        if t.len() != rank {
            return Err(Error::Usage(format!("expected {rank} coordinates, got {}", t.len())).into());
        }
        let s = Solution::new(rank, j, partner)?.with_flavor(p.flavor);
        let r = s.eval(&p.series, &SymmetricPoint { t: t.to_vec() })?;
        write(out, eval_out(r), "out")
    })
}

/// K-function from the series combination at the elementary symmetric
/// coordinates `t[0..len]`.
///
/// # Safety
/// As for `conebessel_eval_j`.
#[no_mangle]
pub unsafe extern "C" fn conebessel_eval_k_series(
    params: *const ConebesselParams,
    rank: usize,
    t: *const f64,
    len: usize,
    out: *mut ConebesselEval,
) -> ConebesselStatus {
    guard(|| {
        let p = handle(params)?;
        let t = slice(t, len, "t")?;
        let r = k_series_with(rank, &p.series, &SymmetricPoint { t: t.to_vec() }, KMethod::Auto)?;
        write(out, eval_out(r), "out")
    })
}

/// K-function from the series combination at the eigenvalues `x[0..len]`.
///
/// # Safety
/// As for `conebessel_eval_j`.
#[no_mangle]
pub unsafe extern "C" fn conebessel_eval_k_series_x(
    params: *const ConebesselParams,
    rank: usize,
    x: *const f64,
    len: usize,
    out: *mut ConebesselEval,
) -> ConebesselStatus {
    guard(|| {
        let p = handle(params)?;
        let x = slice(x, len, "x")?;
        write(out, eval_out(k_series_x(rank, &p.series, x, KMethod::Auto)?), "out")
    })
}

/// Monte Carlo estimate of the K integral at the diagonal element with
/// eigenvalues `x[0..len]`, using `n` samples. The estimate depends only on
/// the inputs and `seed`.
///
/// # Safety
/// As for `conebessel_eval_j`.
#[no_mangle]
pub unsafe extern "C" fn conebessel_eval_k_mc(
    params: *const ConebesselParams,
    rank: usize,
    x: *const f64,
    len: usize,
    n: u64,
    seed: u64,
    out: *mut ConebesselMc,
) -> ConebesselStatus {
    guard(|| {
        let p = handle(params)?;
        let x = slice(x, len, "x")?;
        if x.len() != rank {
            return Err(Error::Usage(format!("expected {rank} eigenvalues, got {}", x.len())).into());
        }
        let desc = AlgebraDescriptor::new(rank, p.series.d)?;
        let e = k_integral_mc(desc, p.series.nu, &Element::diag(desc, x)?, n, seed)?;
        write(out, ConebesselMc { value: e.value, std_error: e.std_error, n_samples: e.n_samples, seed: e.seed }, "out")
    })
}

/// Coefficients of the K-function in the J-basis. For rank 3, `a[0..4]` and
/// `b[0..4]` receive the plain and partner coefficients; for rank 2 only
/// `a[0..2]` and `b[0..2]` are written.
///
/// # Safety
/// `a` and `b` must each point to at least four writable doubles.
#[no_mangle]
pub unsafe extern "C" fn conebessel_coeffs(rank: usize, nu: f64, d: f64, a: *mut f64, b: *mut f64) -> ConebesselStatus {
    guard(|| {
        if a.is_null() {
            return Err(Failure::Null("a"));
        }
        if b.is_null() {
            return Err(Failure::Null("b"));
        }
        let (ca, cb): (Vec<f64>, Vec<f64>) = match rank {
            2 => {
                let c = coeffs2(nu, d)?;
                (vec![c[0], c[1]], vec![c[2], c[3]])
            }
            3 => {
                let c = coeffs3(nu, d)?;
                (c.a.to_vec(), c.b.to_vec())
            }
            _ => return Err(Error::Usage(format!("coefficients exist for rank 2 and 3, got {rank}")).into()),
        };
        ptr::copy_nonoverlapping(ca.as_ptr(), a, ca.len());
        ptr::copy_nonoverlapping(cb.as_ptr(), b, cb.len());
        Ok(())
    })
}

/// Runs the checks named in `suite` ("all" or a comma-separated list).
///
/// # Safety
/// `suite` must be a nul-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn conebessel_verify_run(
    suite: *const c_char,
    seed: u64,
    out: *mut *mut ConebesselReport,
) -> ConebesselStatus {
    guard(|| {
        if suite.is_null() {
            return Err(Failure::Null("suite"));
        }
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let suite = CStr::from_ptr(suite)
            .to_str()
            .map_err(|e| Failure::BadString(format!("suite is not UTF-8: {e}")))?;
        let report = run_suite(&Suite::parse(suite), seed)?;
        let names = report
            .results
            .iter()
            .map(|r| CString::new(r.name.as_str()).expect("check names contain no nul"))
            .collect();
        out.write(Box::into_raw(Box::new(ConebesselReport { report, names })));
        Ok(())
    })
}

/// Number of results in a report; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn conebessel_report_len(report: *const ConebesselReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.results.len())
}

/// Number of failed checks in a report; 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn conebessel_report_failed(report: *const ConebesselReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.summary.fail)
}

/// Name of result `i`, owned by the report; NULL when out of range.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn conebessel_report_name(report: *const ConebesselReport, i: usize) -> *const c_char {
    report
        .as_ref()
        .and_then(|r| r.names.get(i))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Numeric fields of result `i`.
///
/// # Safety
/// `report` must be a live report handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn conebessel_report_check(
    report: *const ConebesselReport,
    i: usize,
    out: *mut ConebesselCheck,
) -> ConebesselStatus {
    guard(|| {
        let r = report.as_ref().ok_or(Failure::Null("report"))?;
        let c = r.report.results.get(i).ok_or_else(|| {
            Error::Usage(format!("result index {i} out of range for {} results", r.report.results.len()))
        })?;
        write(out, ConebesselCheck { passed: c.passed, observed: c.observed, bound: c.bound, work: c.work }, "out")
    })
}

/// The report as JSON. The string must be released with
/// `conebessel_string_free`; NULL for a NULL report.
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn conebessel_report_json(report: *const ConebesselReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| {
        CString::new(json::to_string(&r.report)).expect("JSON has no nul").into_raw()
    })
}

/// Releases a report. NULL is ignored.
///
/// # Safety
/// `report` must be NULL or come from `conebessel_verify_run`, and must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn conebessel_report_free(report: *mut ConebesselReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a string returned by `conebessel_report_json`.
#[no_mangle]
pub unsafe extern "C" fn conebessel_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        let p = conebessel_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn every_error_maps_to_a_distinct_status() {
        let errors = [
            Error::Usage(String::new()),
            Error::UnsupportedAlgebra { rank: 5, d: 1.0 },
            Error::Singular { det: 0.0 },
            Error::Domain(String::new()),
            Error::NotInCone { min_eigenvalue: -1.0 },
            Error::NonGeneric { what: String::new(), arg: 0.0 },
            Error::NoConvergence { partial: 0.0, last_layer: 0.0, work: 0 },
            Error::IllConditioned(String::new()),
            Error::Divergent(String::new()),
            Error::NonFiniteWeight { sample: 0, detail: String::new() },
            Error::UnknownCheck { name: String::new(), registered: vec![] },
        ];
        let mut codes: Vec<i32> = errors.iter().map(|e| status_of(e) as i32).collect();
        assert!(codes.iter().all(|&c| c != 0));
        codes.sort();
        codes.dedup();
        assert_eq!(codes.len(), errors.len());
    }

    #[test]
    fn panics_are_caught() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, ConebesselStatus::Panic);
        assert!(last_error().contains("boom"));
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            assert_eq!(conebessel_params_new(0.3, 1.0, ptr::null_mut()), ConebesselStatus::NullPointer);
            let mut e = ConebesselEval::default();
            let t = [0.1, 0.01];
            assert_eq!(conebessel_eval_j(ptr::null(), 2, 1, false, t.as_ptr(), 2, &mut e), ConebesselStatus::NullPointer);
            assert!(last_error().contains("params"));
        }
    }
}
