//! C ABI over `fcforge`.
//!
//! Families and verdicts are opaque heap handles released with their
//! `*_free` function. Strings returned through `char **` out-parameters are
//! owned by the caller and released with `fcforge_string_free`. Every
//! fallible function returns an `FcStatus`; on failure a message is available
//! from `fcforge_last_error` until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fcforge::bounds::window_contribution;
use fcforge::poonen::{
    find_c, k_value, prove_not_fc, verify_fc, Certificate, Discovery, SearchOptions, Verdict,
    WeightVector,
};
use fcforge::setfam::{Family, GeneratorSystem};
use fcforge::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Unsupported = 5,
    BudgetExhausted = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcVerdictKind {
    FcVerified = 0,
    CounterexampleFound = 1,
    Inconclusive = 2,
    NotFc = 3,
}

/// Opaque set family.
pub struct FcFamily {
    inner: Family,
}

/// Opaque verification verdict.
pub struct FcVerdict {
    inner: Verdict,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(FcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => FcStatus::Parse,
            Error::Unsupported(_) | Error::GroundSize(_) => FcStatus::Unsupported,
            _ => FcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            FcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FcStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FcStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(FcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(FcStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c =
        CString::new(s).map_err(|_| Failure(FcStatus::InvalidArgument, "interior NUL".into()))?;
    put(out, c.into_raw(), "out")
}

fn options(budget: u64, threads: u32) -> SearchOptions {
    let mut o = SearchOptions::default();
    if budget > 0 {
        o.budget = budget;
    }
    if threads > 0 {
        o.threads = threads as usize;
    }
    o
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn fcforge_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn fcforge_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a family in the text format (`n=<int>` then one set per line).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_family_parse(
    text: *const c_char,
    out: *mut *mut FcFamily,
) -> FcStatus {
    guard(|| {
        let fam: Family = str_arg(text, "text")?.parse()?;
        put(out, Box::into_raw(Box::new(FcFamily { inner: fam })), "out")
    })
}

/// Parses a generator system and returns the family it generates.
///
/// # Safety
/// As for `fcforge_family_parse`.
#[no_mangle]
pub unsafe extern "C" fn fcforge_close(
    gens_text: *const c_char,
    out: *mut *mut FcFamily,
) -> FcStatus {
    guard(|| {
        let gens: GeneratorSystem = str_arg(gens_text, "gens_text")?.parse()?;
        put(
            out,
            Box::into_raw(Box::new(FcFamily {
                inner: gens.close(),
            })),
            "out",
        )
    })
}

/// # Safety
/// `f` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fcforge_family_free(f: *mut FcFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of sets; 0 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fcforge_family_len(f: *const FcFamily) -> usize {
    f.as_ref().map_or(0, |f| f.inner.len())
}

/// Ground-set size; 0 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fcforge_family_ground(f: *const FcFamily) -> usize {
    f.as_ref().map_or(0, |f| f.inner.ground())
}

/// Text form of the family.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_family_to_string(
    f: *const FcFamily,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        let f = ref_arg(f, "family")?;
        put_string(out, f.inner.to_string())
    })
}

/// `K_c(A)` as `p/q` text; `weights` is `a,b,…`.
///
/// # Safety
/// `a` must be a live handle, `weights` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_k_value(
    a: *const FcFamily,
    weights: *const c_char,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        let a = ref_arg(a, "family")?;
        let c = WeightVector::parse(str_arg(weights, "weights")?)?;
        put_string(out, k_value(&a.inner, &c)?.to_string())
    })
}

/// Exhaustive check of `weights` for the base family `b`. `budget` and
/// `threads` of 0 select the defaults.
///
/// # Safety
/// `b` must be a live handle, `weights` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_verify(
    b: *const FcFamily,
    weights: *const c_char,
    budget: u64,
    threads: u32,
    out: *mut *mut FcVerdict,
) -> FcStatus {
    guard(|| {
        let b = ref_arg(b, "family")?;
        let c = WeightVector::parse(str_arg(weights, "weights")?)?;
        let v = verify_fc(&b.inner, &c, &options(budget, threads))?;
        put(out, Box::into_raw(Box::new(FcVerdict { inner: v })), "out")
    })
}

/// # Safety
/// `v` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fcforge_verdict_free(v: *mut FcVerdict) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// # Safety
/// `v` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_verdict_kind(
    v: *const FcVerdict,
    out: *mut FcVerdictKind,
) -> FcStatus {
    guard(|| {
        let kind = match ref_arg(v, "verdict")?.inner {
            Verdict::FcVerified { .. } => FcVerdictKind::FcVerified,
            Verdict::CounterexampleFound { .. } => FcVerdictKind::CounterexampleFound,
            Verdict::Inconclusive { .. } => FcVerdictKind::Inconclusive,
            Verdict::NotFc(_) => FcVerdictKind::NotFc,
        };
        put(out, kind, "out")
    })
}

/// One-line summary of the verdict.
///
/// # Safety
/// `v` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_verdict_to_string(
    v: *const FcVerdict,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| put_string(out, ref_arg(v, "verdict")?.inner.to_string()))
}

/// The negative family of a `CounterexampleFound` verdict, as a new handle.
///
/// # Safety
/// `v` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_verdict_family(
    v: *const FcVerdict,
    out: *mut *mut FcFamily,
) -> FcStatus {
    guard(|| match &ref_arg(v, "verdict")?.inner {
        Verdict::CounterexampleFound { family, .. } => put(
            out,
            Box::into_raw(Box::new(FcFamily {
                inner: family.clone(),
            })),
            "out",
        ),
        _ => Err(Failure(
            FcStatus::InvalidArgument,
            "verdict carries no family".into(),
        )),
    })
}

/// Weight search. Writes a certificate line (`FC …` or `NOTFC …`);
/// returns `BudgetExhausted` when the search is inconclusive.
///
/// # Safety
/// `b` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_find_c(
    b: *const FcFamily,
    budget: u64,
    threads: u32,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        let b = ref_arg(b, "family")?;
        match find_c(&b.inner, &[], &options(budget, threads))? {
            Discovery::Certified(cert) => put_string(out, cert.to_string()),
            Discovery::Inconclusive { rounds, nodes } => Err(Failure(
                FcStatus::BudgetExhausted,
                format!("inconclusive after {rounds} rounds and {nodes} nodes"),
            )),
        }
    })
}

/// Farkas certificate from the default probes. `*found` is set to whether
/// one exists; `*out` receives the `NOTFC …` line or null.
///
/// # Safety
/// `b` must be a live handle; `found` and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_prove_not_fc(
    b: *const FcFamily,
    found: *mut bool,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        let b = ref_arg(b, "family")?;
        match prove_not_fc(&b.inner, &[])? {
            Some(w) => {
                put(found, true, "found")?;
                put_string(out, Certificate::NotFc(w).to_string())
            }
            None => {
                put(found, false, "found")?;
                put(out, ptr::null_mut(), "out")
            }
        }
    })
}

/// `(2r − n) / C(n−r, w−r)` as `p/q` text.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fcforge_window_contribution(
    r: usize,
    n: usize,
    w: usize,
    out: *mut *mut c_char,
) -> FcStatus {
    guard(|| put_string(out, window_contribution(r, n, w)?.to_string()))
}
