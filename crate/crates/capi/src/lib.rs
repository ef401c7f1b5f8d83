//! C ABI for the miura toolkit.
//!
//! Pipelines are built behind an opaque handle; every entry point returns a
//! [`MiuraStatus`] code and stores a human-readable message retrievable via
//! [`miura_last_error_message`]. Buffers are caller-allocated; sizes are
//! queried through the handle getters. All functions are panic-safe.

// negated float comparisons are deliberate: they reject NaN parameters
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use miura::cli::realize_q;
use miura::error::Error;
use miura::field::{Grid, Slice, XAxis};
use miura::pipeline::{invert_miura_flow, required_initial_axis, PipelineOptions, PipelineResult};
use miura::speclang::parse_initial_data;
use miura::spectral::{discretize_schrodinger, eigen_bisect};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

/// Status codes mirroring the CLI exit taxonomy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiuraStatus {
    Ok = 0,
    /// Null pointer, undersized buffer, or invalid numeric argument.
    InvalidArgument = 1,
    /// Spec string or symbol file failed to parse.
    ParseError = 2,
    /// Initial data is not Miura-compatible with the background flow.
    GateError = 3,
    /// Numerical failure (domain escape, step-size limit, non-finite data).
    NumericalError = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> MiuraStatus {
    match err {
        Error::Parse(_) | Error::Io { .. } => MiuraStatus::ParseError,
        Error::MiuraIncompatible { .. } => MiuraStatus::GateError,
        Error::InvalidGrid(_) | Error::ShapeMismatch(_) => MiuraStatus::InvalidArgument,
        _ => MiuraStatus::NumericalError,
    }
}

/// Message for the most recent error on this thread (empty if none).
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn miura_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Opaque pipeline result handle.
pub struct MiuraPipeline {
    result: PipelineResult,
}

/// Scalar diagnostics of a pipeline run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MiuraDiagnostics {
    pub min_psi: f64,
    pub kernel_residual: f64,
    pub mkdv_residual: f64,
    pub wronskian_drift: f64,
    pub r0_fidelity: f64,
    pub gate_deviation: f64,
}

unsafe fn cstr<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

/// Invert the Miura map along a KdV flow.
///
/// `r0_spec` is an initial-data preset (`kink`, `zero`, `const:c=..`,
/// `csv:file=..`) and `q_spec` a KdV solution spec (`zero`, `const:c=..`,
/// `soliton:kappa=..,x0=..`, `boost:c=..(..)`, `numeric:file=..`) or
/// `auto`. On success `*out` owns the handle; free it with
/// [`miura_pipeline_free`].
///
/// # Safety
/// `r0_spec` and `q_spec` must be valid NUL-terminated strings and `out` a
/// valid pointer; the handle must be freed exactly once.
#[no_mangle]
pub unsafe extern "C" fn miura_pipeline_run(
    r0_spec: *const c_char,
    q_spec: *const c_char,
    x_min: f64,
    x_max: f64,
    nx: usize,
    t_max: f64,
    nt: usize,
    gate_tol: f64,
    out: *mut *mut MiuraPipeline,
) -> MiuraStatus {
    let (Some(r0_spec), Some(q_spec)) = (cstr(r0_spec), cstr(q_spec)) else {
        set_error("null or non-UTF8 spec string");
        return MiuraStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("null output handle");
        return MiuraStatus::InvalidArgument;
    }
    let run = catch_unwind(AssertUnwindSafe(|| -> Result<PipelineResult, Error> {
        let base = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
        let grid = Grid::new(x_min, x_max, nx, 0.0, t_max, nt)?;
        let r0_data = parse_initial_data(r0_spec, &base)?;
        let q = realize_q(q_spec, &r0_data, &grid, &base)?;
        let r0 = match &r0_data {
            miura::speclang::InitialData::Csv(_) => r0_data.materialize(grid.x_axis())?,
            _ => r0_data.materialize(&required_initial_axis(&q, &grid))?,
        };
        let opts = PipelineOptions {
            gate_tol: if gate_tol > 0.0 { gate_tol } else { 1e-6 },
            ..PipelineOptions::default()
        };
        invert_miura_flow(&r0, &q, &grid, &opts)
    }));
    match run {
        Ok(Ok(result)) => {
            *out = Box::into_raw(Box::new(MiuraPipeline { result }));
            MiuraStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            MiuraStatus::NumericalError
        }
    }
}

/// Number of spatial nodes of the result grid.
///
/// # Safety
/// `handle` must be a live pipeline handle.
#[no_mangle]
pub unsafe extern "C" fn miura_pipeline_nx(handle: *const MiuraPipeline) -> usize {
    handle.as_ref().map(|h| h.result.r.grid().nx()).unwrap_or(0)
}

/// Number of time levels of the result grid.
///
/// # Safety
/// `handle` must be a live pipeline handle.
#[no_mangle]
pub unsafe extern "C" fn miura_pipeline_nt(handle: *const MiuraPipeline) -> usize {
    handle.as_ref().map(|h| h.result.r.grid().nt()).unwrap_or(0)
}

unsafe fn copy_field(
    handle: *const MiuraPipeline,
    buf: *mut f64,
    len: usize,
    pick: impl Fn(&PipelineResult) -> &[f64],
) -> MiuraStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null handle");
        return MiuraStatus::InvalidArgument;
    };
    let values = pick(&h.result);
    if buf.is_null() || len < values.len() {
        set_error(&format!("buffer of {len} too small for {} values", values.len()));
        return MiuraStatus::InvalidArgument;
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    MiuraStatus::Ok
}

/// Copy the recovered mKdV solution r(t, x), row-major over (t, x).
///
/// # Safety
/// `handle` must be live; `buf` must point to at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn miura_pipeline_r(
    handle: *const MiuraPipeline,
    buf: *mut f64,
    len: usize,
) -> MiuraStatus {
    copy_field(handle, buf, len, |r| r.r.values())
}

/// Copy log psi(t, x), row-major over (t, x).
///
/// # Safety
/// `handle` must be live; `buf` must point to at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn miura_pipeline_log_psi(
    handle: *const MiuraPipeline,
    buf: *mut f64,
    len: usize,
) -> MiuraStatus {
    copy_field(handle, buf, len, |r| r.log_psi.values())
}

/// Fill the scalar diagnostics of a run.
///
/// # Safety
/// `handle` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn miura_pipeline_diagnostics(
    handle: *const MiuraPipeline,
    out: *mut MiuraDiagnostics,
) -> MiuraStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null handle");
        return MiuraStatus::InvalidArgument;
    };
    if out.is_null() {
        set_error("null diagnostics pointer");
        return MiuraStatus::InvalidArgument;
    }
    let d = &h.result.diagnostics;
    *out = MiuraDiagnostics {
        min_psi: d.min_psi,
        kernel_residual: d.kernel_residual,
        mkdv_residual: d.mkdv_residual,
        wronskian_drift: d.wronskian_drift,
        r0_fidelity: d.r0_fidelity,
        gate_deviation: d.gate_deviation,
    };
    MiuraStatus::Ok
}

/// Free a pipeline handle (null is a no-op).
///
/// # Safety
/// `handle` must come from [`miura_pipeline_run`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn miura_pipeline_free(handle: *mut MiuraPipeline) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Eigenvalues of -d2/dx2 + q on [x_min, x_min + (n-1) h] with Dirichlet
/// ends, inside (window_lo, window_hi), by Sturm bisection. Writes at most
/// `cap` eigenvalues into `buf` and the discovered count into `n_out`.
///
/// # Safety
/// `q` must point to `n` doubles, `buf` to `cap` doubles, `n_out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn miura_schrodinger_spectrum(
    q: *const f64,
    n: usize,
    x_min: f64,
    h: f64,
    window_lo: f64,
    window_hi: f64,
    tol: f64,
    buf: *mut f64,
    cap: usize,
    n_out: *mut usize,
) -> MiuraStatus {
    if q.is_null() || buf.is_null() || n_out.is_null() || n < 16 || !(h > 0.0) {
        set_error("invalid spectrum arguments");
        return MiuraStatus::InvalidArgument;
    }
    let values = std::slice::from_raw_parts(q, n).to_vec();
    let run = catch_unwind(AssertUnwindSafe(|| -> Result<Vec<f64>, Error> {
        let axis = XAxis::new(x_min, x_min + (n - 1) as f64 * h, n)?;
        let slice = Slice::new(axis, values)?;
        let spec = eigen_bisect(&discretize_schrodinger(&slice), (window_lo, window_hi), tol)?;
        Ok(spec.flattened())
    }));
    match run {
        Ok(Ok(evs)) => {
            let count = evs.len().min(cap);
            std::ptr::copy_nonoverlapping(evs.as_ptr(), buf, count);
            *n_out = evs.len();
            if evs.len() > cap {
                set_error("buffer smaller than the number of eigenvalues");
                return MiuraStatus::InvalidArgument;
            }
            MiuraStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            MiuraStatus::NumericalError
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn pipeline_roundtrip_over_the_c_abi() {
        let mut handle: *mut MiuraPipeline = std::ptr::null_mut();
        let status = unsafe {
            miura_pipeline_run(
                c("kink").as_ptr(),
                c("boost:c=1(soliton:kappa=1,x0=0)").as_ptr(),
                -5.0,
                5.0,
                128,
                0.1,
                11,
                1e-4,
                &mut handle,
            )
        };
        assert_eq!(status, MiuraStatus::Ok);
        let (nx, nt) = unsafe { (miura_pipeline_nx(handle), miura_pipeline_nt(handle)) };
        assert_eq!((nx, nt), (128, 11));
        let mut buf = vec![0.0f64; nx * nt];
        assert_eq!(
            unsafe { miura_pipeline_r(handle, buf.as_mut_ptr(), buf.len()) },
            MiuraStatus::Ok
        );
        // r(0, middle) close to -tanh(0) = 0
        assert!(buf[nx / 2].abs() < 1e-5);
        let mut diag = MiuraDiagnostics {
            min_psi: 0.0,
            kernel_residual: 0.0,
            mkdv_residual: 0.0,
            wronskian_drift: 0.0,
            r0_fidelity: 0.0,
            gate_deviation: 0.0,
        };
        assert_eq!(
            unsafe { miura_pipeline_diagnostics(handle, &mut diag) },
            MiuraStatus::Ok
        );
        assert!(diag.min_psi > 0.0);
        assert!(diag.mkdv_residual < 1e-1);
        // undersized buffer is rejected
        assert_eq!(
            unsafe { miura_pipeline_r(handle, buf.as_mut_ptr(), 3) },
            MiuraStatus::InvalidArgument
        );
        unsafe { miura_pipeline_free(handle) };
    }

    #[test]
    fn error_paths_set_messages() {
        let mut handle: *mut MiuraPipeline = std::ptr::null_mut();
        let status = unsafe {
            miura_pipeline_run(
                c("zero").as_ptr(),
                c("wobble").as_ptr(),
                -5.0,
                5.0,
                64,
                0.1,
                5,
                1e-6,
                &mut handle,
            )
        };
        assert_eq!(status, MiuraStatus::ParseError);
        let msg = unsafe { CStr::from_ptr(miura_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("wobble"));
        // gate failure
        let status = unsafe {
            miura_pipeline_run(
                c("const:c=1").as_ptr(),
                c("const:c=2").as_ptr(),
                -5.0,
                5.0,
                64,
                0.1,
                5,
                1e-6,
                &mut handle,
            )
        };
        assert_eq!(status, MiuraStatus::GateError);
        // null arguments
        let status = unsafe {
            miura_pipeline_run(
                std::ptr::null(),
                c("zero").as_ptr(),
                -5.0,
                5.0,
                64,
                0.1,
                5,
                1e-6,
                &mut handle,
            )
        };
        assert_eq!(status, MiuraStatus::InvalidArgument);
    }

    #[test]
    fn spectrum_over_the_c_abi() {
        let n = 2001usize;
        let h = 60.0 / (n - 1) as f64;
        let q: Vec<f64> = (0..n)
            .map(|j| {
                let x: f64 = -30.0 + j as f64 * h;
                -2.0 / x.cosh().powi(2)
            })
            .collect();
        let mut buf = vec![0.0f64; 8];
        let mut count = 0usize;
        let status = unsafe {
            miura_schrodinger_spectrum(
                q.as_ptr(),
                n,
                -30.0,
                h,
                -2.0,
                -0.5,
                1e-10,
                buf.as_mut_ptr(),
                buf.len(),
                &mut count,
            )
        };
        assert_eq!(status, MiuraStatus::Ok);
        assert_eq!(count, 1);
        assert!((buf[0] + 1.0).abs() < 1e-4, "eigenvalue {}", buf[0]);
    }
}
