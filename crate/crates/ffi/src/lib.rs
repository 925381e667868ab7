//! C interface to the `depinfer` library.
//!
//! Every fallible function returns a [`DiStatus`]; results go through out
//! pointers, which are left untouched on failure. The message for the most
//! recent failure on the calling thread is available from
//! [`di_last_error_message`]. Series are opaque handles created by
//! [`di_series_new`] or [`di_simulate`] and released with [`di_series_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use depinfer::dgp::{kesten_zeta, simulate_ar_arch, DgpSpec, InnovationDist, DEFAULT_BURN_IN};
use depinfer::group::run_group_test;
use depinfer::hac::hac_test_with;
use depinfer::special::normal_quantile;
use depinfer::series::{estimate, DependenceSpec, Measure, Series};
use depinfer::tail::rank_size_zeta;
use depinfer::Error;

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DataError = 3,
    NumericalError = 4,
    Panic = 5,
}

/// Dependence measure selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiMeasure {
    AbsPowerAutocov = 0,
    AbsPowerAutocorr = 1,
    SignedPowerCrosscov = 2,
    SignedPowerCrosscorr = 3,
}

impl From<DiMeasure> for Measure {
    fn from(m: DiMeasure) -> Self {
        match m {
            DiMeasure::AbsPowerAutocov => Measure::AbsPowerAutocov,
            DiMeasure::AbsPowerAutocorr => Measure::AbsPowerAutocorr,
            DiMeasure::SignedPowerCrosscov => Measure::SignedPowerCrosscov,
            DiMeasure::SignedPowerCrosscorr => Measure::SignedPowerCrosscorr,
        }
    }
}

/// Opaque handle to an immutable return series.
pub struct DiSeries {
    inner: Series,
}

/// Common summary of a HAC or group t-test.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiTestResult {
    pub estimate: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub critical_value: f64,
    /// 1 when the null is rejected at level `1 − confidence`.
    pub reject: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DiTailResult {
    pub zeta_hat: f64,
    pub std_err: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub k_used: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DiStatus {
    match e.exit_code() {
        1 => DiStatus::InvalidParameter,
        2 => DiStatus::DataError,
        _ => DiStatus::NumericalError,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), DiStatus>>(f: F) -> DiStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            DiStatus::Panic
        }
    }
}

fn lib<T>(r: depinfer::Result<T>) -> Result<T, DiStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> DiStatus {
    set_error(format!("null pointer: {what}"));
    DiStatus::NullPointer
}

unsafe fn series_ref<'a>(s: *const DiSeries) -> Result<&'a Series, DiStatus> {
    s.as_ref().map(|s| &s.inner).ok_or_else(|| null("series"))
}

fn innovation(eta: f64, lambda: f64) -> depinfer::Result<InnovationDist> {
    if eta == 0.0 {
        Ok(InnovationDist::StandardNormal)
    } else {
        InnovationDist::skewed_t(eta, lambda)
    }
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn di_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn di_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `len` values into a new series handle.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn di_series_new(values: *const f64, len: usize, out: *mut *mut DiSeries) -> DiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if values.is_null() && len > 0 {
            return Err(null("values"));
        }
        let v = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(values, len).to_vec()
        };
        let inner = lib(Series::new(v))?;
        *out = Box::into_raw(Box::new(DiSeries { inner }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn di_series_free(s: *mut DiSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of observations, or 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn di_series_len(s: *const DiSeries) -> usize {
    s.as_ref().map_or(0, |s| s.inner.len())
}

/// Copies up to `cap` values into `buf` and returns the series length.
///
/// # Safety
/// `s` must be a live handle; `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn di_series_copy(s: *const DiSeries, buf: *mut f64, cap: usize) -> usize {
    let Some(s) = s.as_ref() else { return 0 };
    let v = s.inner.values();
    if !buf.is_null() {
        let n = cap.min(v.len());
        std::ptr::copy_nonoverlapping(v.as_ptr(), buf, n);
    }
    v.len()
}

/// Simulates an AR(1)-GARCH(1,1) series. `eta = 0` selects standard normal
/// innovations, otherwise a skewed t with `eta` degrees of freedom and
/// skewness `lambda`. A negative `burn_in` selects the default.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn di_simulate(
    phi: f64,
    omega: f64,
    alpha: f64,
    beta: f64,
    eta: f64,
    lambda: f64,
    len: usize,
    burn_in: i64,
    seed: u64,
    out: *mut *mut DiSeries,
) -> DiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = DgpSpec {
            phi,
            omega,
            alpha,
            beta,
            innovation: lib(innovation(eta, lambda))?,
            len,
            burn_in: usize::try_from(burn_in).unwrap_or(DEFAULT_BURN_IN),
            seed,
        };
        let inner = lib(simulate_ar_arch(&spec))?;
        *out = Box::into_raw(Box::new(DiSeries { inner }));
        Ok(())
    })
}

/// Point estimate of a dependence measure at `lag`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn di_estimate(
    s: *const DiSeries,
    measure: DiMeasure,
    exponent: f64,
    lag: usize,
    out: *mut f64,
) -> DiStatus {
    guard(|| {
        let x = series_ref(s)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = lib(DependenceSpec::new(measure.into(), exponent, lag))?;
        *out = lib(estimate(x, &spec))?;
        Ok(())
    })
}

/// Group t-test with `q` blocks of `H₀: β = beta0`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn di_group_test(
    s: *const DiSeries,
    measure: DiMeasure,
    exponent: f64,
    lag: usize,
    q: usize,
    beta0: f64,
    confidence: f64,
    out: *mut DiTestResult,
) -> DiStatus {
    guard(|| {
        let x = series_ref(s)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = lib(DependenceSpec::new(measure.into(), exponent, lag))?;
        let r = lib(run_group_test(x, &spec, q, beta0, confidence))?;
        *out = DiTestResult {
            estimate: r.pooled,
            t_stat: r.t_stat,
            p_value: r.p_value,
            ci_lower: r.ci.0,
            ci_upper: r.ci.1,
            critical_value: r.critical_value,
            reject: r.reject as i32,
        };
        Ok(())
    })
}

/// HAC t-test of `H₀: β = beta0` with the quadratic-spectral kernel and
/// automatic bandwidth.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn di_hac_test(
    s: *const DiSeries,
    measure: DiMeasure,
    exponent: f64,
    lag: usize,
    beta0: f64,
    confidence: f64,
    out: *mut DiTestResult,
) -> DiStatus {
    guard(|| {
        let x = series_ref(s)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = lib(DependenceSpec::new(measure.into(), exponent, lag))?;
        let kernel = depinfer::hac::KernelSpec::qs_auto();
        let r = lib(hac_test_with(x, &spec, beta0, &kernel, confidence))?;
        *out = DiTestResult {
            estimate: r.estimate,
            t_stat: r.t_stat,
            p_value: r.p_value,
            ci_lower: r.ci.0,
            ci_upper: r.ci.1,
            critical_value: normal_quantile(0.5 + confidence / 2.0),
            reject: r.reject as i32,
        };
        Ok(())
    })
}

/// Tail index `ζ` solving `E[(αZ² + β)^{ζ/2}] = 1`; `eta = 0` selects normal
/// innovations.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn di_kesten_zeta(alpha: f64, beta: f64, eta: f64, lambda: f64, out: *mut f64) -> DiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dist = lib(innovation(eta, lambda))?;
        *out = lib(kesten_zeta(alpha, beta, &dist))?;
        Ok(())
    })
}

/// Rank-size tail-index estimate from the largest `fraction` of `|R_t|`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn di_tail_index(s: *const DiSeries, fraction: f64, out: *mut DiTailResult) -> DiStatus {
    guard(|| {
        let x = series_ref(s)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = lib(rank_size_zeta(x, fraction))?;
        *out = DiTailResult {
            zeta_hat: t.zeta_hat,
            std_err: t.std_err,
            ci_lower: t.ci.0,
            ci_upper: t.ci.1,
            k_used: t.k_used,
        };
        Ok(())
    })
}
