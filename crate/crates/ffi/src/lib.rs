//! C ABI over the `qmf` library.
//!
//! Every fallible function returns a [`QmfStatus`]; on failure the message
//! is available from [`qmf_last_error_message`] on the same thread. Series
//! results are opaque [`QmfSeries`] handles released with
//! [`qmf_series_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmf::hybrid::{estimate_snr, optimal_segment_length, plan_segments, Backend, HybridConfig, SegmentLength};
use qmf::matched::{oracle_snr, predict_precision, SnrSeries, TimeSeries};
use qmf::simulator::NoiseModel;
use qmf::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    PlanError = 4,
    Internal = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmfBackend {
    Exact = 0,
    Ideal = 1,
    Statevector = 2,
    Noisy = 3,
}

/// Hybrid estimator settings. `k_d == 0` selects the segment length
/// automatically.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QmfHybridParams {
    pub backend: QmfBackend,
    pub k_d: usize,
    pub k_t: usize,
    pub shots_per_run: u64,
    pub margin: f64,
    pub seed: u64,
    pub p_two_qubit: f64,
    pub p_readout: f64,
}

/// Opaque matched-filter output.
pub struct QmfSeries {
    inner: SnrSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QmfStatus {
    match e {
        Error::InfeasiblePlan(_) | Error::QubitCapExceeded { .. } => QmfStatus::PlanError,
        Error::LengthMismatch { .. }
        | Error::SampleRateMismatch { .. }
        | Error::EmptySeries
        | Error::NonFinite { .. }
        | Error::ZeroNorm
        | Error::Parse { .. } => QmfStatus::DataError,
        Error::InvalidParameter(_) | Error::LagOutOfRange { .. } | Error::BitstringWidth { .. } => QmfStatus::InvalidArgument,
        _ => QmfStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (QmfStatus, String)>) -> QmfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmfStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside qmf".into());
            QmfStatus::Panic
        }
    }
}

fn lift<T>(r: qmf::Result<T>) -> Result<T, (QmfStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (QmfStatus, String) {
    (QmfStatus::NullPointer, format!("{what} is null"))
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], (QmfStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn series(values: &[f64], rate: f64) -> Result<TimeSeries, (QmfStatus, String)> {
    lift(TimeSeries::new(values.to_vec(), rate, 0.0))
}

fn emit(out: *mut *mut QmfSeries, s: SnrSeries) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(QmfSeries { inner: s })) };
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qmf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qmf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn qmf_hybrid_params_default() -> QmfHybridParams {
    QmfHybridParams {
        backend: QmfBackend::Ideal,
        k_d: 4,
        k_t: 2,
        shots_per_run: 10_000,
        margin: 0.0,
        seed: 0,
        p_two_qubit: 0.0,
        p_readout: 0.0,
    }
}

/// Classical matched filter `rho[j] = Σ data[j+i]·template[i]`.
///
/// # Safety
/// `template` and `data` must point to `template_len` and `data_len`
/// doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qmf_oracle_snr(
    template: *const f64,
    template_len: usize,
    data: *const f64,
    data_len: usize,
    sample_rate: f64,
    out: *mut *mut QmfSeries,
) -> QmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let x = series(slice(template, template_len, "template")?, sample_rate)?;
        let y = series(slice(data, data_len, "data")?, sample_rate)?;
        emit(out, lift(oracle_snr(&x, &y))?);
        Ok(())
    })
}

/// Hybrid estimate of the matched filter.
///
/// # Safety
/// As [`qmf_oracle_snr`]; `params` must point to a valid struct.
#[no_mangle]
pub unsafe extern "C" fn qmf_estimate_snr(
    template: *const f64,
    template_len: usize,
    data: *const f64,
    data_len: usize,
    sample_rate: f64,
    params: *const QmfHybridParams,
    out: *mut *mut QmfSeries,
) -> QmfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let x = series(slice(template, template_len, "template")?, sample_rate)?;
        let y = series(slice(data, data_len, "data")?, sample_rate)?;
        let backend = match p.backend {
            QmfBackend::Exact => Backend::Exact,
            QmfBackend::Ideal => Backend::Ideal,
            QmfBackend::Statevector => Backend::Statevector,
            QmfBackend::Noisy => Backend::Noisy(lift(NoiseModel::new(p.p_two_qubit, p.p_readout))?),
        };
        let k_d = if p.k_d == 0 { SegmentLength::Auto } else { SegmentLength::Fixed(p.k_d) };
        let plan = lift(plan_segments(y.len(), x.len(), k_d, p.k_t, p.shots_per_run))?;
        let config = HybridConfig::new(backend, p.margin, p.seed);
        emit(out, lift(estimate_snr(&x, &y, &plan, &config))?);
        Ok(())
    })
}

/// Number of lags; 0 for a null handle.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmf_series_len(series: *const QmfSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.len())
}

/// Value and standard error at `lag`. `sigma` receives NaN when the
/// series carries none; either output may be null.
///
/// # Safety
/// `series` must be a live handle; outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qmf_series_get(series: *const QmfSeries, lag: usize, value: *mut f64, sigma: *mut f64) -> QmfStatus {
    guard(|| {
        let s = series.as_ref().ok_or_else(|| null("series"))?;
        let e = s
            .inner
            .estimates()
            .get(lag)
            .ok_or_else(|| (QmfStatus::InvalidArgument, format!("lag {lag} out of range 0..{}", s.inner.len())))?;
        if !value.is_null() {
            *value = e.value;
        }
        if !sigma.is_null() {
            *sigma = e.sigma.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

/// Copies up to `capacity` values into `buffer`; returns how many were written.
///
/// # Safety
/// `series` must be null or live; `buffer` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn qmf_series_values(series: *const QmfSeries, buffer: *mut f64, capacity: usize) -> usize {
    let Some(s) = series.as_ref() else { return 0 };
    if buffer.is_null() {
        return 0;
    }
    let n = s.inner.len().min(capacity);
    for (i, e) in s.inner.estimates().iter().take(n).enumerate() {
        *buffer.add(i) = e.value;
    }
    n
}

/// Lag with the largest |value|, or -1 for an empty or null series.
///
/// # Safety
/// `series` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmf_series_peak_lag(series: *const QmfSeries) -> i64 {
    series
        .as_ref()
        .and_then(|s| s.inner.peak())
        .map_or(-1, |p| p.lag as i64)
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `series` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qmf_series_free(series: *mut QmfSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Predicted standard error per lag for `shots_per_lag` shots.
///
/// # Safety
/// `values`, `corrections` and `sigma_out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qmf_predict_precision(
    values: *const f64,
    corrections: *const f64,
    len: usize,
    shots_per_lag: f64,
    sigma_out: *mut f64,
) -> QmfStatus {
    guard(|| {
        let v = slice(values, len, "values")?;
        let c = slice(corrections, len, "corrections")?;
        if len > 0 && sigma_out.is_null() {
            return Err(null("sigma_out"));
        }
        for (i, p) in lift(predict_precision(v, shots_per_lag, c))?.iter().enumerate() {
            *sigma_out.add(i) = p.sigma;
        }
        Ok(())
    })
}

/// Integer segment length minimizing the sampling cost for template chunks
/// of `n` points, and the real stationary point.
///
/// # Safety
/// Outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qmf_optimal_segment_length(n: usize, k_out: *mut usize, root_out: *mut f64) -> QmfStatus {
    guard(|| {
        if n == 0 {
            return Err((QmfStatus::InvalidArgument, "template length must be positive".into()));
        }
        let (k, root) = optimal_segment_length(n);
        if !k_out.is_null() {
            *k_out = k;
        }
        if !root_out.is_null() {
            *root_out = root;
        }
        Ok(())
    })
}
