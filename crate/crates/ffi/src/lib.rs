//! C ABI over the `bmx` library.
//!
//! Every fallible function returns a [`BmxStatus`]; on failure the message is
//! kept per thread and read with [`bmx_last_error_message`]. Objects cross the
//! boundary as opaque handles that the caller releases with the matching
//! `_free` function.

use bmx::cli_io::{parse_document, serialize, Value};
use bmx::symmetrization_svd::{svd3, Svd3Options, Svd3Result};
use bmx::{BmxError, Hypermatrix3, C64};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BmxStatus {
    Ok = 0,
    NullPointer = 1,
    Shape = 2,
    NotCubic = 3,
    NotSquare = 4,
    SingularFiber = 5,
    DegenerateFamily = 6,
    SingularSystem = 7,
    NoBranch = 8,
    InvalidParameter = 9,
    Precondition = 10,
    SizeGuard = 11,
    Document = 12,
    Utf8 = 13,
    Panic = 99,
}

impl From<&BmxError> for BmxStatus {
    fn from(e: &BmxError) -> Self {
        match e {
            BmxError::Shape(_) => Self::Shape,
            BmxError::NotCubic { .. } => Self::NotCubic,
            BmxError::NotSquare { .. } => Self::NotSquare,
            BmxError::SingularFiber { .. } => Self::SingularFiber,
            BmxError::DegenerateFamily { .. } => Self::DegenerateFamily,
            BmxError::SingularSystem { .. } => Self::SingularSystem,
            BmxError::NoBranch { .. } => Self::NoBranch,
            BmxError::InvalidParameter(_) => Self::InvalidParameter,
            BmxError::Precondition(_) => Self::Precondition,
            BmxError::SizeGuard(_) => Self::SizeGuard,
            BmxError::Document { .. } => Self::Document,
        }
    }
}

/// Opaque third-order hypermatrix with complex entries.
pub struct BmxHypermatrix(Hypermatrix3);

/// Opaque result of the 2×2×2 symmetrization SVD.
pub struct BmxSvd3(Svd3Result);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (BmxStatus, String)>) -> BmxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BmxStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BmxStatus::Panic
        }
    }
}

fn lib(e: BmxError) -> (BmxStatus, String) {
    ((&e).into(), e.to_string())
}

fn null(what: &str) -> (BmxStatus, String) {
    (BmxStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (BmxStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bmx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bmx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a hypermatrix from row-major real and imaginary parts.
/// `im` may be null for a real hypermatrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `n0*n1*n2` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmx_hypermatrix_new(
    n0: usize,
    n1: usize,
    n2: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut BmxHypermatrix,
) -> BmxStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if re.is_null() {
            return Err(null("re"));
        }
        let len = n0
            .checked_mul(n1)
            .and_then(|x| x.checked_mul(n2))
            .ok_or((BmxStatus::Shape, "shape overflows".to_string()))?;
        let re = std::slice::from_raw_parts(re, len);
        let data = if im.is_null() {
            re.iter().map(|&r| C64::new(r, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&r, &i)| C64::new(r, i)).collect()
        };
        emit(out, BmxHypermatrix(Hypermatrix3::new([n0, n1, n2], data).map_err(lib)?));
        Ok(())
    })
}

/// Releases a hypermatrix. Null is ignored.
///
/// # Safety
/// `h` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bmx_hypermatrix_free(h: *mut BmxHypermatrix) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Writes the three side lengths into `shape`.
///
/// # Safety
/// `shape` must point to three writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn bmx_hypermatrix_shape(h: *const BmxHypermatrix, shape: *mut usize) -> BmxStatus {
    guard(|| {
        let h = deref(h, "h")?;
        if shape.is_null() {
            return Err(null("shape"));
        }
        std::slice::from_raw_parts_mut(shape, 3).copy_from_slice(&h.0.shape());
        Ok(())
    })
}

/// Copies the row-major entries into `re` and `im` (either may be null).
/// `len` is the capacity of each buffer and must be at least the entry count.
///
/// # Safety
/// Non-null buffers must hold `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bmx_hypermatrix_entries(
    h: *const BmxHypermatrix,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> BmxStatus {
    guard(|| {
        let data = deref(h, "h")?.0.data();
        if len < data.len() {
            return Err((BmxStatus::Shape, format!("buffer holds {len} entries, need {}", data.len())));
        }
        if !re.is_null() {
            let re = std::slice::from_raw_parts_mut(re, data.len());
            re.iter_mut().zip(data).for_each(|(r, z)| *r = z.re);
        }
        if !im.is_null() {
            let im = std::slice::from_raw_parts_mut(im, data.len());
            im.iter_mut().zip(data).for_each(|(i, z)| *i = z.im);
        }
        Ok(())
    })
}

/// Ternary product of three conformable hypermatrices.
///
/// # Safety
/// Handles must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmx_prod3(
    a: *const BmxHypermatrix,
    b: *const BmxHypermatrix,
    c: *const BmxHypermatrix,
    out: *mut *mut BmxHypermatrix,
) -> BmxStatus {
    guard(|| {
        let (a, b, c) = (deref(a, "a")?, deref(b, "b")?, deref(c, "c")?);
        if out.is_null() {
            return Err(null("out"));
        }
        emit(out, BmxHypermatrix(bmx::bm_algebra::prod3(&a.0, &b.0, &c.0).map_err(lib)?));
        Ok(())
    })
}

/// Cyclic transpose applied `power` times.
///
/// # Safety
/// `h` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmx_transpose(
    h: *const BmxHypermatrix,
    power: usize,
    out: *mut *mut BmxHypermatrix,
) -> BmxStatus {
    guard(|| {
        let h = deref(h, "h")?;
        if out.is_null() {
            return Err(null("out"));
        }
        emit(out, BmxHypermatrix(h.0.transpose_pow(power)));
        Ok(())
    })
}

/// Orthogonality check. Writes the verdict and the residual.
///
/// # Safety
/// `h` must be valid; `passed` and `residual` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmx_is_orthogonal(
    h: *const BmxHypermatrix,
    tol: f64,
    passed: *mut bool,
    residual: *mut f64,
) -> BmxStatus {
    guard(|| {
        let h = deref(h, "h")?;
        if passed.is_null() || residual.is_null() {
            return Err(null("passed/residual"));
        }
        let c = bmx::bm_algebra::is_orthogonal(&h.0, tol).map_err(lib)?;
        *passed = c.passed;
        *residual = c.residual;
        Ok(())
    })
}

/// Parses a JSON hypermatrix document (order 3).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmx_hypermatrix_from_json(json: *const c_char, out: *mut *mut BmxHypermatrix) -> BmxStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| (BmxStatus::Utf8, e.to_string()))?;
        match parse_document(text).map_err(lib)? {
            Value::Hypermatrix(h) => {
                emit(out, BmxHypermatrix(h));
                Ok(())
            }
            Value::Matrix(_) => Err((BmxStatus::Document, "expected an order-3 document".into())),
        }
    })
}

/// Serializes a hypermatrix as a JSON document. Release the string with
/// [`bmx_string_free`].
///
/// # Safety
/// `h` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmx_hypermatrix_to_json(h: *const BmxHypermatrix, out: *mut *mut c_char) -> BmxStatus {
    guard(|| {
        let h = deref(h, "h")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serialize(&Value::Hypermatrix(h.0.clone())).map_err(lib)?;
        *out = CString::new(text).map_err(|e| (BmxStatus::Utf8, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bmx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Symmetrization SVD of a 2×2×2 hypermatrix. When `has_gauge` is false the
/// gauge is chosen automatically.
///
/// # Safety
/// `a` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmx_svd3(
    a: *const BmxHypermatrix,
    has_gauge: bool,
    gauge_re: f64,
    gauge_im: f64,
    out: *mut *mut BmxSvd3,
) -> BmxStatus {
    guard(|| {
        let a = deref(a, "a")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = Svd3Options { gauge: has_gauge.then(|| C64::new(gauge_re, gauge_im)), ..Default::default() };
        emit(out, BmxSvd3(svd3(&a.0, &opts).map_err(lib)?));
        Ok(())
    })
}

/// Releases a decomposition. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn bmx_svd3_free(s: *mut BmxSvd3) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Copies factor `which` (0 = Ũ, 1 = Ṽ, 2 = W̃) into a new hypermatrix.
///
/// # Safety
/// `s` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bmx_svd3_factor(s: *const BmxSvd3, which: u32, out: *mut *mut BmxHypermatrix) -> BmxStatus {
    guard(|| {
        let s = &deref(s, "s")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = match which {
            0 => &s.utilde,
            1 => &s.vtilde,
            2 => &s.wtilde,
            _ => return Err((BmxStatus::InvalidParameter, format!("factor index {which} is not 0, 1 or 2"))),
        };
        emit(out, BmxHypermatrix(f.clone()));
        Ok(())
    })
}

/// Copies the eight coefficients, indexed `4i + 2j + k`.
///
/// # Safety
/// `re` and `im` must each hold eight writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bmx_svd3_sigma(s: *const BmxSvd3, re: *mut f64, im: *mut f64) -> BmxStatus {
    guard(|| {
        let s = &deref(s, "s")?.0;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        for (t, z) in s.sigma.iter().enumerate() {
            *re.add(t) = z.re;
            *im.add(t) = z.im;
        }
        Ok(())
    })
}

/// Characteristic, spectral and reconstruction residuals.
///
/// # Safety
/// `residuals` must hold three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bmx_svd3_residuals(s: *const BmxSvd3, residuals: *mut f64) -> BmxStatus {
    guard(|| {
        let r = &deref(s, "s")?.0.residuals;
        if residuals.is_null() {
            return Err(null("residuals"));
        }
        std::slice::from_raw_parts_mut(residuals, 3).copy_from_slice(&[r.characteristic, r.spectral, r.reconstruction]);
        Ok(())
    })
}
