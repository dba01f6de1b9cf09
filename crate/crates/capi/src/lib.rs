//! C ABI: opaque handles, integer status codes, flat arrays. All pointers
//! returned by this library stay valid until the owning handle is freed.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use jacobi_embed::bands::band_structure;
use jacobi_embed::cfunction::c_numeric;
use jacobi_embed::operator::{operator_from_json, PeriodicJacobi};
use jacobi_embed::verify::{embedded_eigen_check, VerificationReport};
use jacobi_embed::wvn::{WvnParams, WvnResult};
use jacobi_embed::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum JeStatus {
    JeOk = 0,
    JeErrInvalidArgument = 1,
    JeErrParse = 2,
    JeErrNotElliptic = 3,
    JeErrObstruction = 4,
    JeErrDomain = 5,
    JeErrInternal = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(err: &Error) -> JeStatus {
    match err {
        Error::InvalidInput(_) | Error::NonPositiveOffDiagonal { .. } => {
            JeStatus::JeErrInvalidArgument
        }
        Error::Io(_) | Error::Parse(_) => JeStatus::JeErrParse,
        Error::NotElliptic(_) => JeStatus::JeErrNotElliptic,
        Error::EmbeddingObstruction(_) => JeStatus::JeErrObstruction,
        Error::InternalInconsistency(_) => JeStatus::JeErrInternal,
        _ => JeStatus::JeErrDomain,
    }
}

fn fail(err: &Error) -> JeStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Message describing the most recent failure on this thread. Borrowed;
/// overwritten by the next failing call.
#[no_mangle]
pub extern "C" fn je_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Opaque periodic Jacobi operator.
pub struct JeOperator {
    inner: PeriodicJacobi,
}

/// Opaque result of one embedding run.
pub struct JeEmbedding {
    result: WvnResult,
    report: VerificationReport,
}

/// Parse an operator from its JSON description
/// `{"a": [...], "b": [...]}` (entries numbers or "p/q" strings).
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn je_operator_from_json(
    json: *const c_char,
    out: *mut *mut JeOperator,
) -> JeStatus {
    if json.is_null() || out.is_null() {
        set_error("null pointer argument");
        return JeStatus::JeErrInvalidArgument;
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("operator JSON is not valid UTF-8");
            return JeStatus::JeErrParse;
        }
    };
    match operator_from_json(text) {
        Ok(op) => {
            *out = Box::into_raw(Box::new(JeOperator { inner: op }));
            JeStatus::JeOk
        }
        Err(e) => {
            *out = ptr::null_mut();
            fail(&e)
        }
    }
}

/// # Safety
/// `op` must come from `je_operator_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn je_operator_free(op: *mut JeOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live operator handle.
#[no_mangle]
pub unsafe extern "C" fn je_operator_period(op: *const JeOperator) -> usize {
    if op.is_null() {
        return 0;
    }
    (*op).inner.period()
}

/// Spectral bands: writes up to `cap` pairs (lo, hi) into `edges` and the
/// total band count into `n_bands`. `degenerate` (optional) receives 1 when
/// bands touch or a band edge is a multiple discriminant root.
///
/// # Safety
/// `edges` must have room for `2 * cap` doubles; out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn je_band_structure(
    op: *const JeOperator,
    edges: *mut f64,
    cap: usize,
    n_bands: *mut usize,
    degenerate: *mut i32,
) -> JeStatus {
    if op.is_null() || n_bands.is_null() || (cap > 0 && edges.is_null()) {
        set_error("null pointer argument");
        return JeStatus::JeErrInvalidArgument;
    }
    match band_structure(&(*op).inner) {
        Ok(bs) => {
            *n_bands = bs.bands.len();
            if !degenerate.is_null() {
                *degenerate = bs.degenerate as i32;
            }
            for (i, &(lo, hi)) in bs.bands.iter().take(cap).enumerate() {
                *edges.add(2 * i) = lo;
                *edges.add(2 * i + 1) = hi;
            }
            JeStatus::JeOk
        }
        Err(e) => fail(&e),
    }
}

/// Value of the embeddability function at an elliptic point.
///
/// # Safety
/// `op` live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn je_c_eval(
    op: *const JeOperator,
    lambda: f64,
    out: *mut f64,
) -> JeStatus {
    if op.is_null() || out.is_null() {
        set_error("null pointer argument");
        return JeStatus::JeErrInvalidArgument;
    }
    match c_numeric(&(*op).inner, lambda) {
        Ok(v) => {
            *out = v;
            JeStatus::JeOk
        }
        Err(e) => fail(&e),
    }
}

/// Run the embedding construction and its verification.
///
/// # Safety
/// `op` live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn je_embed(
    op: *const JeOperator,
    lambda: f64,
    alpha: f64,
    n: usize,
    tail_tol: f64,
    out: *mut *mut JeEmbedding,
) -> JeStatus {
    if op.is_null() || out.is_null() {
        set_error("null pointer argument");
        return JeStatus::JeErrInvalidArgument;
    }
    let params = WvnParams::new(lambda)
        .with_alpha(alpha)
        .with_horizon(n)
        .with_tail_tol(tail_tol);
    match embedded_eigen_check(&(*op).inner, &params) {
        Ok((result, report)) => {
            *out = Box::into_raw(Box::new(JeEmbedding { result, report }));
            JeStatus::JeOk
        }
        Err(e) => {
            *out = ptr::null_mut();
            fail(&e)
        }
    }
}

/// # Safety
/// `e` must come from `je_embed` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn je_embedding_free(e: *mut JeEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Number of sites in the constructed sequences.
///
/// # Safety
/// `e` live handle.
#[no_mangle]
pub unsafe extern "C" fn je_embedding_len(e: *const JeEmbedding) -> usize {
    if e.is_null() {
        return 0;
    }
    (*e).result.horizon()
}

/// Candidate eigenvector u_1..u_N; borrowed from the handle.
///
/// # Safety
/// `e` live handle; pointer valid until `je_embedding_free`.
#[no_mangle]
pub unsafe extern "C" fn je_embedding_u(e: *const JeEmbedding) -> *const f64 {
    if e.is_null() {
        return ptr::null();
    }
    (*e).result.u_seq().as_ptr()
}

/// Perturbation q_1..q_N; borrowed from the handle.
///
/// # Safety
/// `e` live handle; pointer valid until `je_embedding_free`.
#[no_mangle]
pub unsafe extern "C" fn je_embedding_q(e: *const JeEmbedding) -> *const f64 {
    if e.is_null() {
        return ptr::null();
    }
    (*e).result.q_seq().as_ptr()
}

/// Tail sums omega_1..omega_N; borrowed from the handle.
///
/// # Safety
/// `e` live handle; pointer valid until `je_embedding_free`.
#[no_mangle]
pub unsafe extern "C" fn je_embedding_omega(e: *const JeEmbedding) -> *const f64 {
    if e.is_null() {
        return ptr::null();
    }
    (*e).result.omega_seq().as_ptr()
}

/// Key verification figures for an embedding run.
#[repr(C)]
pub struct JeVerification {
    pub max_interior_residual: f64,
    pub first_row_residual: f64,
    pub spectral_distance: f64,
    pub residual_bound: f64,
    pub eigvec_correlation: f64,
    pub decay_exponent_fit: f64,
    pub decay_exponent_expected: f64,
    pub wronskian_drift: f64,
}

/// # Safety
/// `e` live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn je_embedding_verification(
    e: *const JeEmbedding,
    out: *mut JeVerification,
) -> JeStatus {
    if e.is_null() || out.is_null() {
        set_error("null pointer argument");
        return JeStatus::JeErrInvalidArgument;
    }
    let r = &(*e).report;
    *out = JeVerification {
        max_interior_residual: r.max_interior_residual,
        first_row_residual: r.first_row_residual,
        spectral_distance: r.spectral_distance,
        residual_bound: r.residual_bound,
        eigvec_correlation: r.eigvec_correlation,
        decay_exponent_fit: r.decay_exponent_fit,
        decay_exponent_expected: r.decay_exponent_expected,
        wronskian_drift: r.wronskian_drift,
    };
    JeStatus::JeOk
}
