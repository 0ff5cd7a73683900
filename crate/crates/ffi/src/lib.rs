//! C ABI over the `effidx` library.
//!
//! Objects cross the boundary as opaque handles (`EffidxReturns`,
//! `EffidxReport`) created and destroyed by this library. Every fallible call
//! returns an `EffidxStatus`; on failure, `effidx_last_error_message` gives a
//! description valid until the next failing call on the same thread. Results
//! are written through caller-provided out-pointers only on success.
//!
//! Panics never unwind into C: they are caught and reported as
//! `EFFIDX_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use effidx::config::{AnalysisConfig, KpssConfig};
use effidx::efficiency::{analyze, efficiency_index, MeasureName, MeasureVector, N_MEASURES};
use effidx::fractal::{fd_genton, fd_hall_wood, fd_periodogram, fd_wavelet};
use effidx::hurst::{dfa_combined, dma, hhca};
use effidx::report::ReportJson;
use effidx::series::profile;
use effidx::stats::{acf1, kpss, KpssVerdict};
use effidx::synth::{generate, SynthSpec};
use effidx::{EfficiencyReport, Error, ReturnSeries};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffidxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    InsufficientData = 3,
    DegenerateInput = 4,
    DegenerateFit = 5,
    Parameter = 6,
    Generation = 7,
    Io = 8,
    Panic = 99,
}

impl From<&Error> for EffidxStatus {
    fn from(e: &Error) -> Self {
        match e.root() {
            Error::InvalidInput(_) | Error::Csv { .. } => EffidxStatus::InvalidInput,
            Error::InsufficientData { .. } | Error::InsufficientPoints(_) => EffidxStatus::InsufficientData,
            Error::DegenerateInput(_) => EffidxStatus::DegenerateInput,
            Error::DegenerateFit(_) | Error::RegressionUndefined(_) => EffidxStatus::DegenerateFit,
            Error::Parameter(_) => EffidxStatus::Parameter,
            Error::Generation(_) => EffidxStatus::Generation,
            Error::Io(_) => EffidxStatus::Io,
            Error::Estimator { .. } => unreachable!("root() strips estimator wrappers"),
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffidxHurstMethod {
    /// Mean of linear and quadratic DFA.
    Dfa = 0,
    Dma = 1,
    Hhca = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffidxFractalMethod {
    Periodogram = 0,
    Wavelet = 1,
    Genton = 2,
    HallWood = 3,
}

/// The eight measures in index order.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffidxMeasure {
    HDfa = 0,
    HDma = 1,
    HHhca = 2,
    DPeriodogram = 3,
    DWavelet = 4,
    DGenton = 5,
    DHallWood = 6,
    Rho1 = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffidxKpssVerdict {
    /// p > 0.05
    Stationary = 0,
    /// 0.01 < p < 0.05
    Reject5 = 1,
    /// p < 0.01
    Reject1 = 2,
}

/// Opaque return series.
pub struct EffidxReturns(ReturnSeries);

/// Opaque efficiency report.
pub struct EffidxReport(EfficiencyReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(EffidxStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_last_error(&e.to_string());
        Fail(EffidxStatus::from(&e))
    }
}

fn null_pointer(what: &str) -> Fail {
    set_last_error(&format!("null pointer: {what}"));
    Fail(EffidxStatus::NullPointer)
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EffidxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EffidxStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_last_error("internal panic");
            EffidxStatus::Panic
        }
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null_pointer(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null_pointer(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null_pointer(what));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn effidx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a return series from `len` raw values (all finite).
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_returns_from_values(
    values: *const f64,
    len: usize,
    out: *mut *mut EffidxReturns,
) -> EffidxStatus {
    guard(|| {
        let v = slice(values, len, "values")?;
        let r = ReturnSeries::new("ffi", v.to_vec())?;
        write(out, Box::into_raw(Box::new(EffidxReturns(r))), "out")
    })
}

/// Builds the log-return series of `len` positive closes in time order.
///
/// # Safety
/// `closes` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_returns_from_prices(
    closes: *const f64,
    len: usize,
    out: *mut *mut EffidxReturns,
) -> EffidxStatus {
    guard(|| {
        let c = slice(closes, len, "closes")?;
        let r = ReturnSeries::from_closes("ffi", c)?;
        write(out, Box::into_raw(Box::new(EffidxReturns(r))), "out")
    })
}

/// Exact fractional Gaussian noise; `t` must be a power of two of at least 256.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_synth_fgn(h: f64, t: usize, seed: u64, out: *mut *mut EffidxReturns) -> EffidxStatus {
    guard(|| {
        let r = generate(&SynthSpec::fgn(h, t, seed))?;
        write(out, Box::into_raw(Box::new(EffidxReturns(r))), "out")
    })
}

/// Number of returns, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn effidx_returns_len(r: *const EffidxReturns) -> usize {
    r.as_ref().map_or(0, |r| r.0.len())
}

/// Releases a return series; null is ignored.
///
/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn effidx_returns_free(r: *mut EffidxReturns) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Hurst exponent with default parameters. Either out-pointer may be null.
///
/// # Safety
/// `r` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_hurst(
    r: *const EffidxReturns,
    method: EffidxHurstMethod,
    h_raw: *mut f64,
    h_clamped: *mut f64,
) -> EffidxStatus {
    guard(|| {
        let x = &deref(r, "returns")?.0;
        let cfg = AnalysisConfig::default();
        let est = match method {
            EffidxHurstMethod::Dfa => dfa_combined(x, &cfg.dfa)?,
            EffidxHurstMethod::Dma => dma(x, &cfg.dma)?,
            EffidxHurstMethod::Hhca => hhca(x, &cfg.hhca)?,
        };
        if !h_raw.is_null() {
            h_raw.write(est.h_raw);
        }
        if !h_clamped.is_null() {
            h_clamped.write(est.h_clamped);
        }
        Ok(())
    })
}

/// Fractal dimension of the integrated path with default parameters.
/// Either out-pointer may be null.
///
/// # Safety
/// `r` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_fractal(
    r: *const EffidxReturns,
    method: EffidxFractalMethod,
    d_raw: *mut f64,
    d_clamped: *mut f64,
) -> EffidxStatus {
    guard(|| {
        let x = &deref(r, "returns")?.0;
        let cfg = AnalysisConfig::default();
        let p = profile(x)?;
        let path = p.values();
        let est = match method {
            EffidxFractalMethod::Periodogram => fd_periodogram(path, &cfg.periodogram)?,
            EffidxFractalMethod::Wavelet => fd_wavelet(path, &cfg.wavelet)?,
            EffidxFractalMethod::Genton => fd_genton(path)?,
            EffidxFractalMethod::HallWood => fd_hall_wood(path)?,
        };
        if !d_raw.is_null() {
            d_raw.write(est.d_raw);
        }
        if !d_clamped.is_null() {
            d_clamped.write(est.d_clamped);
        }
        Ok(())
    })
}

/// Lag-one sample autocorrelation.
///
/// # Safety
/// `r` must be a live handle; `rho1` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_acf1(r: *const EffidxReturns, rho1: *mut f64) -> EffidxStatus {
    guard(|| {
        let v = acf1(&deref(r, "returns")?.0)?.rho1;
        write(rho1, v, "rho1")
    })
}

/// KPSS level-stationarity test; `bandwidth` 0 selects the default rule.
/// Any out-pointer may be null.
///
/// # Safety
/// `r` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_kpss(
    r: *const EffidxReturns,
    bandwidth: usize,
    statistic: *mut f64,
    used_bandwidth: *mut usize,
    verdict: *mut EffidxKpssVerdict,
) -> EffidxStatus {
    guard(|| {
        let cfg = KpssConfig {
            bandwidth: (bandwidth > 0).then_some(bandwidth),
        };
        let k = kpss(&deref(r, "returns")?.0, &cfg)?;
        if !statistic.is_null() {
            statistic.write(k.statistic);
        }
        if !used_bandwidth.is_null() {
            used_bandwidth.write(k.bandwidth);
        }
        if !verdict.is_null() {
            verdict.write(match k.verdict {
                KpssVerdict::Stationary => EffidxKpssVerdict::Stationary,
                KpssVerdict::Reject5 => EffidxKpssVerdict::Reject5,
                KpssVerdict::Reject1 => EffidxKpssVerdict::Reject1,
            });
        }
        Ok(())
    })
}

/// Efficiency index of eight raw measures in `EffidxMeasure` order; values
/// are clamped to their legal ranges first.
///
/// # Safety
/// `measures` must point to 8 readable doubles; `ei` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_efficiency_index(measures: *const f64, ei: *mut f64) -> EffidxStatus {
    guard(|| {
        let m = slice(measures, N_MEASURES, "measures")?;
        if let Some(i) = m.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite measure at index {i}")).into());
        }
        let raw: [f64; N_MEASURES] = m.try_into().expect("length checked");
        write(ei, efficiency_index(&MeasureVector::from_raw(raw)), "ei")
    })
}

/// Full analysis with default parameters.
///
/// # Safety
/// `r` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_analyze(r: *const EffidxReturns, out: *mut *mut EffidxReport) -> EffidxStatus {
    guard(|| {
        let rep = analyze(&deref(r, "returns")?.0, &AnalysisConfig::default())?;
        write(out, Box::into_raw(Box::new(EffidxReport(rep))), "out")
    })
}

/// Efficiency index of a report, or NaN for a null handle.
///
/// # Safety
/// `rep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn effidx_report_ei(rep: *const EffidxReport) -> f64 {
    rep.as_ref().map_or(f64::NAN, |r| r.0.ei)
}

/// Local and global shares of EI². For a fully efficient report (EI = 0)
/// `*defined` is set to false and the shares are left untouched.
///
/// # Safety
/// `rep` must be a live handle; all out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_report_shares(
    rep: *const EffidxReport,
    defined: *mut bool,
    local_share: *mut f64,
    global_share: *mut f64,
) -> EffidxStatus {
    guard(|| {
        let r = deref(rep, "report")?;
        match r.0.shares {
            Some(s) => {
                write(local_share, s.local, "local_share")?;
                write(global_share, s.global, "global_share")?;
                write(defined, true, "defined")
            }
            None => write(defined, false, "defined"),
        }
    })
}

/// Raw and clamped value of one measure. Either out-pointer may be null.
///
/// # Safety
/// `rep` must be a live handle; non-null out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn effidx_report_estimate(
    rep: *const EffidxReport,
    measure: EffidxMeasure,
    raw: *mut f64,
    clamped: *mut f64,
) -> EffidxStatus {
    guard(|| {
        let r = deref(rep, "report")?;
        let e = r.0.vector.get(MeasureName::ALL[measure as usize]);
        if !raw.is_null() {
            raw.write(e.raw);
        }
        if !clamped.is_null() {
            clamped.write(e.estimate);
        }
        Ok(())
    })
}

/// The report as pretty JSON (same schema as the CLI). Free the string
/// with `effidx_string_free`. Returns null on a null handle.
///
/// # Safety
/// `rep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn effidx_report_to_json(rep: *const EffidxReport) -> *mut c_char {
    let Some(r) = rep.as_ref() else {
        set_last_error("null pointer: report");
        return ptr::null_mut();
    };
    catch_unwind(AssertUnwindSafe(|| {
        CString::new(ReportJson::from(&r.0).to_json_pretty()).map_or(ptr::null_mut(), CString::into_raw)
    }))
    .unwrap_or(ptr::null_mut())
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn effidx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Releases a report; null is ignored.
///
/// # Safety
/// `rep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn effidx_report_free(rep: *mut EffidxReport) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}
