//! C ABI over flgauge.
//!
//! Modules cross the boundary as opaque `FlgModule` handles created by
//! `flg_module_parse` and released with `flg_module_free`. Every function
//! returns an `FlgStatus`; on failure `flg_last_error` describes the error.
//! Strings are NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use flgauge::fl::{fl_hom_ext1, torsionfree_lift, FLModule};
use flgauge::{format, mazsyn, sen, Error};

/// Status codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    /// a mathematical check failed or an input is outside the certified range
    Math = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// An FL module over W(F_q)/p^N.
pub struct FlgModule {
    inner: FLModule,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> FlgStatus {
    match e {
        Error::Parse { .. } => FlgStatus::Parse,
        Error::NonUnit(_) | Error::NotNDetermined(_) | Error::Integrality(_) | Error::Verification(_) | Error::Truncation { .. } => {
            FlgStatus::Math
        }
        _ => FlgStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), FlgStatus>) -> FlgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FlgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            FlgStatus::Panic
        }
    }
}

fn lib<T>(r: flgauge::Result<T>) -> Result<T, FlgStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

unsafe fn module<'a>(m: *const FlgModule) -> Result<&'a FLModule, FlgStatus> {
    if m.is_null() {
        set_error("null module handle");
        return Err(FlgStatus::NullPointer);
    }
    Ok(&(*m).inner)
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, FlgStatus> {
    if p.is_null() {
        set_error("null output pointer");
        return Err(FlgStatus::NullPointer);
    }
    Ok(&mut *p)
}

fn boxed(m: FLModule) -> *mut FlgModule {
    Box::into_raw(Box::new(FlgModule { inner: m }))
}

/// Copies `s` with a trailing NUL into `buf` of capacity `cap`; `needed` receives the full size.
unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), FlgStatus> {
    let n = s.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() || cap < n {
        set_error(format!("buffer of {cap} bytes is too small, {n} needed"));
        return Err(FlgStatus::BufferTooSmall);
    }
    std::ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Copies the message of the last error on this thread into `buf`.
///
/// # Safety
/// `buf` must point to `cap` writable bytes or be null; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn flg_last_error(buf: *mut c_char, cap: usize, needed: *mut usize) -> FlgStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    guard(|| write_str(&msg, buf, cap, needed))
}

/// Parses a module document (kind fl) into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flg_module_parse(text: *const c_char, out: *mut *mut FlgModule) -> FlgStatus {
    guard(|| {
        let out = out_ptr(out)?;
        *out = std::ptr::null_mut();
        if text.is_null() {
            set_error("null text");
            return Err(FlgStatus::NullPointer);
        }
        let s = CStr::from_ptr(text).to_str().map_err(|_| {
            set_error("text is not UTF-8");
            FlgStatus::InvalidUtf8
        })?;
        *out = boxed(lib(format::parse_fl(s))?);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn flg_module_free(m: *mut FlgModule) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Writes the canonical text of `m`.
///
/// # Safety
/// `m` must be a live handle; `buf` must point to `cap` writable bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn flg_module_emit(m: *const FlgModule, buf: *mut c_char, cap: usize, needed: *mut usize) -> FlgStatus {
    guard(|| write_str(&format::emit_fl(module(m)?), buf, cap, needed))
}

/// Runs the FL validation; `passed` receives the verdict.
///
/// # Safety
/// `m` must be a live handle and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flg_module_validate(m: *const FlgModule, passed: *mut bool) -> FlgStatus {
    guard(|| {
        let r = lib(module(m)?.validate())?;
        *out_ptr(passed)? = r.passed();
        Ok(())
    })
}

/// F_p-dimensions of Hom and Ext^1 from `m` to `n`, both killed by p.
///
/// # Safety
/// Handles must be live and output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn flg_hom_ext1(m: *const FlgModule, n: *const FlgModule, hom: *mut usize, ext1: *mut usize) -> FlgStatus {
    guard(|| {
        let (h, e) = lib(fl_hom_ext1(module(m)?, module(n)?))?;
        *out_ptr(hom)? = h;
        *out_ptr(ext1)? = e;
        Ok(())
    })
}

/// Lengths (sums of elementary-divisor exponents) of syntomic H0 and H1 in weight `i`.
///
/// # Safety
/// `m` must be a live handle and output pointers valid.
#[no_mangle]
pub unsafe extern "C" fn flg_syntomic_lengths(m: *const FlgModule, i: usize, h0: *mut u64, h1: *mut u64) -> FlgStatus {
    guard(|| {
        let s = lib(mazsyn::syntomic_cohomology_fl(module(m)?, i))?;
        *out_ptr(h0)? = s.h0.iter().map(|&e| e as u64).sum();
        *out_ptr(h1)? = s.h1.iter().map(|&e| e as u64).sum();
        Ok(())
    })
}

/// The Tate twist of `m` by `i` as a new handle.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flg_module_twist(m: *const FlgModule, i: usize, out: *mut *mut FlgModule) -> FlgStatus {
    guard(|| {
        let t = module(m)?.twist(i);
        *out_ptr(out)? = boxed(t);
        Ok(())
    })
}

/// The torsion-free lift of a module killed by p, as a new handle.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flg_module_lift(m: *const FlgModule, out: *mut *mut FlgModule) -> FlgStatus {
    guard(|| {
        let l = lib(torsionfree_lift(module(m)?))?;
        *out_ptr(out)? = boxed(l);
        Ok(())
    })
}

/// Applies (F, φ) -> (F, φ(1 - α)) to a module killed by p.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flg_sen_apply(m: *const FlgModule, out: *mut *mut FlgModule) -> FlgStatus {
    guard(|| {
        let r = lib(sen::di_maz_endofunctor(module(m)?))?;
        *out_ptr(out)? = boxed(r);
        Ok(())
    })
}

/// Class t of an extension of k{p-1} by k{0}: its f coefficients go to `coeffs`
/// (capacity `cap`), and `splits` tells whether the extension splits.
///
/// # Safety
/// `m` must be a live handle; `coeffs` must point to `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn flg_extension_class(m: *const FlgModule, coeffs: *mut u64, cap: usize, splits: *mut bool) -> FlgStatus {
    guard(|| {
        let c = lib(sen::extension_class(module(m)?))?;
        let t = c.t.coeffs();
        if coeffs.is_null() || cap < t.len() {
            set_error(format!("need room for {} coefficients", t.len()));
            return Err(FlgStatus::BufferTooSmall);
        }
        std::ptr::copy_nonoverlapping(t.as_ptr(), coeffs, t.len());
        *out_ptr(splits)? = c.splits;
        Ok(())
    })
}

/// The Mazur number [n] for the prime p.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flg_mazur_number(p: u64, n: i64, out: *mut u64) -> FlgStatus {
    guard(|| {
        *out_ptr(out)? = lib(flgauge::arith::mazur_number(p, n))?;
        Ok(())
    })
}

/// Runs acceptance criterion `id` (1 to 11).
///
/// # Safety
/// `passed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flg_acceptance_criterion(id: u8, passed: *mut bool) -> FlgStatus {
    guard(|| {
        let o = flgauge::acceptance::run_one(id).ok_or_else(|| {
            set_error(format!("no criterion {id}"));
            FlgStatus::InvalidArgument
        })?;
        *out_ptr(passed)? = o.passed;
        Ok(())
    })
}
