//! C ABI over `equichan-core`.
//!
//! Channels live behind the opaque `EqChannel` handle. Every fallible call returns an
//! `EqStatus`; on failure `eq_last_error_message` describes the problem for the calling thread.
//! Matrices cross the boundary as separate row-major real and imaginary `double` arrays.
//! Strings returned through `char **` must be released with `eq_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use equichan_core::channels::{DiagonalParams, Family, LinearMap, ProductParams, UnitaryParams};
use equichan_core::choi::choi_generic;
use equichan_core::classify::{classify, cp_u, ppt_eb_u, schwarz_u, RegionVerdict};
use equichan_core::compose::compose;
use equichan_core::linalg::{ComplexMatrix, Tolerance, C64};
use equichan_core::oracle::{kadison_gap, schwarz_falsify, FalsifyOptions};
use equichan_core::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotHermitian = 4,
    Unsupported = 5,
    InvalidJson = 6,
    Panic = 7,
}

/// Opaque channel handle.
pub struct EqChannel {
    family: Family,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (EqStatus, String);

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> EqStatus {
    match e {
        Error::DimensionMismatch(_) => EqStatus::DimensionMismatch,
        Error::NotHermitian { .. } | Error::NotHermitianIntermediate { .. } => EqStatus::NotHermitian,
        Error::UnsupportedDimensions(_) | Error::UnsupportedFamily(_) | Error::FamilyMismatch(_) => EqStatus::Unsupported,
        _ => EqStatus::InvalidArgument,
    }
}

fn core(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> Failure {
    (EqStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic for `eq_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EqStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EqStatus::Panic
        }
    }
}

unsafe fn channel<'a>(h: *const EqChannel) -> Result<&'a EqChannel, Failure> {
    h.as_ref().ok_or_else(|| null("channel"))
}

unsafe fn emit(out: *mut *mut EqChannel, family: Family) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(EqChannel { family }));
    Ok(())
}

unsafe fn read_matrix(n: usize, re: *const f64, im: *const f64) -> Result<ComplexMatrix, Failure> {
    if re.is_null() || im.is_null() {
        return Err(null("matrix buffer"));
    }
    let (re, im) = (std::slice::from_raw_parts(re, n * n), std::slice::from_raw_parts(im, n * n));
    Ok(ComplexMatrix::from_fn(n, n, |i, j| C64::new(re[i * n + j], im[i * n + j])))
}

unsafe fn write_matrix(m: &ComplexMatrix, re: *mut f64, im: *mut f64) -> Result<(), Failure> {
    if re.is_null() || im.is_null() {
        return Err(null("output buffer"));
    }
    let len = m.rows() * m.cols();
    let (re, im) = (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len));
    for (k, z) in m.as_slice().iter().enumerate() {
        re[k] = z.re;
        im[k] = z.im;
    }
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s).map_err(|e| (EqStatus::InvalidArgument, e.to_string()))?.into_raw();
    Ok(())
}

unsafe fn emit_verdict(v: RegionVerdict, member: *mut c_int, margin: *mut f64) -> Result<(), Failure> {
    if member.is_null() || margin.is_null() {
        return Err(null("out"));
    }
    *member = c_int::from(v.member);
    *margin = v.margin;
    Ok(())
}

fn tolerance(eig_zero: f64, herm_sym: f64) -> Result<Tolerance, Failure> {
    if !(eig_zero >= 0.0 && herm_sym >= 0.0) {
        return Err((EqStatus::InvalidArgument, "tolerances must be nonnegative".into()));
    }
    Ok(Tolerance { eig_zero, herm_sym })
}

/// Message for the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn eq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn eq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses parameter JSON (`{"family": "U" | "DU" | "PROD", ...}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_from_json(json: *const c_char, out: *mut *mut EqChannel) -> EqStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| (EqStatus::InvalidArgument, e.to_string()))?;
        let family: Family = serde_json::from_str(text)
            .map_err(|e| (EqStatus::InvalidJson, format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column())))?;
        emit(out, family)
    })
}

/// Unital U(n) channel `X ↦ ((1 − λ)/n)·tr(X)·I + λX`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_new_unitary(n: usize, lambda: f64, out: *mut *mut EqChannel) -> EqStatus {
    guard(|| emit(out, UnitaryParams::unital(n, lambda).map_err(core)?.into()))
}

/// Unital DU(2) channel with leakages `c12`, `c21` and coherence `λ`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_new_du2(c12: f64, c21: f64, lambda_re: f64, lambda_im: f64, out: *mut *mut EqChannel) -> EqStatus {
    guard(|| emit(out, DiagonalParams::du2(c12, c21, C64::new(lambda_re, lambda_im)).into()))
}

/// Permutation-symmetric DU(3) channel with diagonal weight `p` and coherence `λ`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_new_du3_symmetric(p: f64, lambda_re: f64, lambda_im: f64, out: *mut *mut EqChannel) -> EqStatus {
    guard(|| emit(out, DiagonalParams::du3_symmetric(p, C64::new(lambda_re, lambda_im)).into()))
}

/// Unital product channel on `C^n1 ⊗ C^n2` with `λ00 = 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_new_product(n1: usize, n2: usize, l01: f64, l10: f64, l11: f64, out: *mut *mut EqChannel) -> EqStatus {
    guard(|| emit(out, ProductParams::unital(n1, n2, l01, l10, l11).map_err(core)?.into()))
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `ch` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_free(ch: *mut EqChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Matrix size `n` of the channel's input and output, or 0 for a null handle.
///
/// # Safety
/// `ch` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_dim(ch: *const EqChannel) -> usize {
    ch.as_ref().map_or(0, |c| c.family.dim())
}

/// `Y = Φ(X)` for `n x n` matrices given as row-major real/imaginary arrays of length `n*n`.
///
/// # Safety
/// All buffers must hold `n*n` doubles, where `n = eq_channel_dim(ch)`.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_apply(ch: *const EqChannel, x_re: *const f64, x_im: *const f64, y_re: *mut f64, y_im: *mut f64) -> EqStatus {
    guard(|| {
        let c = channel(ch)?;
        let x = read_matrix(c.family.dim(), x_re, x_im)?;
        write_matrix(&c.family.apply(&x).map_err(core)?, y_re, y_im)
    })
}

/// Choi matrix (size `n² x n²`) into row-major buffers of length `len`.
///
/// # Safety
/// Both buffers must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_choi(ch: *const EqChannel, re: *mut f64, im: *mut f64, len: usize) -> EqStatus {
    guard(|| {
        let c = channel(ch)?;
        let n = c.family.dim();
        let needed = n.pow(4);
        if len != needed {
            return Err((EqStatus::DimensionMismatch, format!("Choi buffers need {needed} entries, got {len}")));
        }
        write_matrix(&choi_generic(&c.family, n).map_err(core)?.matrix, re, im)
    })
}

/// New handle for `outer ∘ inner` (inner acts first).
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_compose(outer: *const EqChannel, inner: *const EqChannel, out: *mut *mut EqChannel) -> EqStatus {
    guard(|| {
        let composed = compose(&channel(outer)?.family, &channel(inner)?.family).map_err(core)?;
        emit(out, composed)
    })
}

/// Full classification report as JSON.
///
/// # Safety
/// `ch` must be live; `out` must be writable. Free the result with `eq_string_free`.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_classify_json(ch: *const EqChannel, eig_zero: f64, herm_sym: f64, out: *mut *mut c_char) -> EqStatus {
    guard(|| {
        let report = classify(&channel(ch)?.family, &tolerance(eig_zero, herm_sym)?).map_err(core)?;
        emit_string(out, serde_json::to_string(&report).map_err(|e| (EqStatus::InvalidArgument, e.to_string()))?)
    })
}

/// Parameter JSON accepted by `eq_channel_from_json`.
///
/// # Safety
/// `ch` must be live; `out` must be writable. Free the result with `eq_string_free`.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_to_json(ch: *const EqChannel, out: *mut *mut c_char) -> EqStatus {
    guard(|| {
        let text = serde_json::to_string(&channel(ch)?.family).map_err(|e| (EqStatus::InvalidArgument, e.to_string()))?;
        emit_string(out, text)
    })
}

/// Smallest eigenvalue of `Φ(X†X) − Φ(X)†Φ(X)` with default tolerances.
///
/// # Safety
/// Input buffers must hold `n*n` doubles; `gap` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_kadison_gap(ch: *const EqChannel, x_re: *const f64, x_im: *const f64, gap: *mut f64) -> EqStatus {
    guard(|| {
        let c = channel(ch)?;
        let x = read_matrix(c.family.dim(), x_re, x_im)?;
        let g = kadison_gap(&c.family, &x, &Tolerance::default()).map_err(core)?;
        if gap.is_null() {
            return Err(null("gap"));
        }
        *gap = g;
        Ok(())
    })
}

/// Searches for a Schwarz violation. Sets `*found` to 1 and `*gap` to the violating gap when
/// one is found; otherwise `*found = 0` and `*gap` is untouched.
///
/// # Safety
/// `ch` must be live; `found` and `gap` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_channel_schwarz_falsify(ch: *const EqChannel, budget: usize, seed: u64, found: *mut c_int, gap: *mut f64) -> EqStatus {
    guard(|| {
        let c = channel(ch)?;
        if found.is_null() || gap.is_null() {
            return Err(null("out"));
        }
        let opts = FalsifyOptions { budget, seed, ..FalsifyOptions::default() };
        match schwarz_falsify(&c.family, &opts).map_err(core)? {
            Some(w) => {
                *found = 1;
                *gap = w.gap;
            }
            None => *found = 0,
        }
        Ok(())
    })
}

/// Schwarz region of unital U(n) maps: `λ ∈ [−1/n, 1]`.
///
/// # Safety
/// `member` and `margin` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_verdict_schwarz_u(n: usize, lambda: f64, member: *mut c_int, margin: *mut f64) -> EqStatus {
    guard(|| emit_verdict(schwarz_u(n, lambda).map_err(core)?, member, margin))
}

/// CP region of unital U(n) maps: `λ ∈ [−1/(n²−1), 1]`.
///
/// # Safety
/// `member` and `margin` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_verdict_cp_u(n: usize, lambda: f64, member: *mut c_int, margin: *mut f64) -> EqStatus {
    guard(|| emit_verdict(cp_u(n, lambda).map_err(core)?, member, margin))
}

/// Partial-transpose region of unital U(n) maps: `λ ∈ [−1/(n−1), 1/(n+1)]`.
///
/// # Safety
/// `member` and `margin` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_verdict_ppt_eb_u(n: usize, lambda: f64, member: *mut c_int, margin: *mut f64) -> EqStatus {
    guard(|| emit_verdict(ppt_eb_u(n, lambda).map_err(core)?, member, margin))
}
