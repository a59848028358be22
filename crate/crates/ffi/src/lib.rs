//! C interface to `klpadic`.
//!
//! Objects cross the boundary as opaque handles (`KlCharacter`, `KlPadic`)
//! that the caller releases with the matching `*_free` function. Every
//! fallible call returns a [`KlStatus`]; on failure a description is kept in
//! thread-local storage and can be read with [`kl_last_error_message`].
//! Strings handed out by the library are NUL-terminated UTF-8 and must be
//! released with [`kl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use klpadic::bernoulli::{bernoulli, format_rational};
use klpadic::dirichlet::{CharacterSpec, DirichletCharacter};
use klpadic::genbernoulli::{general_bernoulli, general_bernoulli_rational};
use klpadic::lfunction::{p_adic_L, verify_interpolation, LpParams, Weight};
use klpadic::measure::BernoulliParams;
use klpadic::{Error, PadicNum, Valuation};
use num_bigint::BigInt;
use num_rational::BigRational;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Precondition = 3,
    Precision = 4,
    Parse = 5,
    Io = 6,
    VerificationFailed = 7,
    Panic = 8,
}

/// A Dirichlet character with values in the p-adic integers.
pub struct KlCharacter(DirichletCharacter);

/// A p-adic number of finite precision.
pub struct KlPadic(PadicNum);

/// Inputs shared by [`kl_lp_eval_json`] and [`kl_verify_json`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct KlLpParams {
    pub p: u64,
    pub d: u64,
    pub c: u64,
    pub m: u32,
    pub prec: u32,
    pub j_min: u32,
    pub j_max: u32,
    pub target: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(KlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InsufficientPrecision { .. } => KlStatus::Precision,
            Error::BadCharacterSpec(_) => KlStatus::Parse,
            Error::TableLoad(_) => KlStatus::Io,
            Error::Precondition(_) | Error::LevelOrder { .. } | Error::LevelTooLow { .. } => KlStatus::Precondition,
            _ => KlStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: KlStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<KlStatus, Failure>) -> KlStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("internal panic: {msg}"));
            KlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return fail(KlStatus::NullPointer, format!("{name} is null"));
    }
    CStr::from_ptr(s).to_str().or_else(|_| fail(KlStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(|| fail(KlStatus::NullPointer, format!("{name} is null")), Ok)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<KlStatus, Failure> {
    if out.is_null() {
        return fail(KlStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    Ok(KlStatus::Ok)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<KlStatus, Failure> {
    let c = CString::new(s).or_else(|_| fail(KlStatus::InvalidArgument, "string contains NUL"))?;
    write_out(out, c.into_raw())
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string(value).or_else(|e| fail(KlStatus::InvalidArgument, e.to_string()))
}

/// Message describing the last failure on this thread, or null if the last
/// call succeeded. The pointer stays valid until the next call on the same
/// thread and must not be freed.
#[no_mangle]
pub extern "C" fn kl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn kl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a character from `triv`, `omega^<k>` or `table:<path>`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_character_from_spec(
    p: u64,
    spec: *const c_char,
    prec: u32,
    out: *mut *mut KlCharacter,
) -> KlStatus {
    guard(|| {
        let spec: CharacterSpec = str_arg(spec, "spec")?.parse()?;
        let chi = spec.build(p, prec)?;
        write_out(out, Box::into_raw(Box::new(KlCharacter(chi))))
    })
}

/// # Safety
/// `chi` must be null or a handle from [`kl_character_from_spec`].
#[no_mangle]
pub unsafe extern "C" fn kl_character_free(chi: *mut KlCharacter) {
    if !chi.is_null() {
        drop(Box::from_raw(chi));
    }
}

/// Writes the conductor as a decimal string.
///
/// # Safety
/// `chi` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_character_conductor(chi: *const KlCharacter, out: *mut *mut c_char) -> KlStatus {
    guard(|| write_string(out, ref_arg(chi, "chi")?.0.conductor().to_string()))
}

/// Writes the level (the modulus the character is defined at) as a decimal
/// string.
///
/// # Safety
/// `chi` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_character_level(chi: *const KlCharacter, out: *mut *mut c_char) -> KlStatus {
    guard(|| write_string(out, ref_arg(chi, "chi")?.0.level().to_string()))
}

/// # Safety
/// `chi` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_character_is_even(chi: *const KlCharacter, out: *mut bool) -> KlStatus {
    guard(|| write_out(out, ref_arg(chi, "chi")?.0.is_even()))
}

/// Writes `B_n` as a reduced fraction such as `-691/2730`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_bernoulli(n: u32, out: *mut *mut c_char) -> KlStatus {
    guard(|| write_string(out, format_rational(&bernoulli(n as usize))))
}

/// Writes `{"n", "value", "rational"}` for the generalized Bernoulli number
/// `B_{n,chi}`; `rational` is null unless the character is real.
///
/// # Safety
/// `chi` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_general_bernoulli_json(chi: *const KlCharacter, n: u32, out: *mut *mut c_char) -> KlStatus {
    guard(|| {
        let chi = &ref_arg(chi, "chi")?.0;
        let value = general_bernoulli(chi, n as usize)?;
        let rational = general_bernoulli_rational(chi, n as usize)?.map(|q| format_rational(&q));
        let body = serde_json::json!({ "n": n, "value": value, "rational": rational });
        write_string(out, json(&body)?)
    })
}

fn lp_params(params: &KlLpParams, chi: &DirichletCharacter) -> Result<LpParams, Failure> {
    let measure = BernoulliParams::new(params.p, params.d, params.c)?;
    Ok(LpParams::new(measure, params.m, chi.clone(), params.prec, params.j_min, params.j_max, params.target)?)
}

/// Evaluates `L_p(s, chi)` at the integer weight `s = k` and writes the
/// evaluation report as JSON.
///
/// # Safety
/// `params` and `chi` must be valid pointers and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_lp_eval_json(
    params: *const KlLpParams,
    chi: *const KlCharacter,
    k: u32,
    out: *mut *mut c_char,
) -> KlStatus {
    guard(|| {
        let params = lp_params(ref_arg(params, "params")?, &ref_arg(chi, "chi")?.0)?;
        let report = p_adic_L(&params, Weight::new(k))?;
        write_string(out, json(&report)?)
    })
}

/// Compares `L_p(1 - n, chi)` with the special value built from
/// `B_{n, chi omega^{-n}}` and writes the report as JSON. The report is
/// written even when the check fails, in which case the status is
/// `VerificationFailed`.
///
/// # Safety
/// `params` and `chi` must be valid pointers and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_verify_json(
    params: *const KlLpParams,
    chi: *const KlCharacter,
    n: u32,
    out: *mut *mut c_char,
) -> KlStatus {
    guard(|| {
        let params = lp_params(ref_arg(params, "params")?, &ref_arg(chi, "chi")?.0)?;
        let report = verify_interpolation(&params, n)?;
        write_string(out, json(&report)?)?;
        if report.pass {
            Ok(KlStatus::Ok)
        } else {
            set_last_error(format!(
                "interpolation check failed: valuation of difference below target {}",
                report.target
            ));
            Ok(KlStatus::VerificationFailed)
        }
    })
}

/// Embeds `num/den` in Q_p with relative precision `prec`.
///
/// # Safety
/// `num` and `den` must be NUL-terminated decimal integers and `out` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_padic_from_rational(
    p: u64,
    num: *const c_char,
    den: *const c_char,
    prec: u32,
    out: *mut *mut KlPadic,
) -> KlStatus {
    guard(|| {
        let parse = |s: &str, name: &str| {
            s.trim().parse::<BigInt>().or_else(|_| fail(KlStatus::Parse, format!("{name} {s:?} is not an integer")))
        };
        let num = parse(str_arg(num, "num")?, "numerator")?;
        let den = parse(str_arg(den, "den")?, "denominator")?;
        if den == BigInt::from(0) {
            return Err(Error::DivisionByZero.into());
        }
        klpadic::modarith::ensure_odd_prime(p)?;
        let x = PadicNum::from_rational(p, &BigRational::new(num, den), prec);
        write_out(out, Box::into_raw(Box::new(KlPadic(x))))
    })
}

/// # Safety
/// `x` must be null or a handle produced by this library.
#[no_mangle]
pub unsafe extern "C" fn kl_padic_free(x: *mut KlPadic) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

unsafe fn padic_binop(
    a: *const KlPadic,
    b: *const KlPadic,
    out: *mut *mut KlPadic,
    op: fn(&PadicNum, &PadicNum) -> klpadic::Result<PadicNum>,
) -> KlStatus {
    guard(|| {
        let r = op(&ref_arg(a, "a")?.0, &ref_arg(b, "b")?.0)?;
        write_out(out, Box::into_raw(Box::new(KlPadic(r))))
    })
}

/// # Safety
/// `a` and `b` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_padic_add(a: *const KlPadic, b: *const KlPadic, out: *mut *mut KlPadic) -> KlStatus {
    padic_binop(a, b, out, PadicNum::add)
}

/// # Safety
/// `a` and `b` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_padic_mul(a: *const KlPadic, b: *const KlPadic, out: *mut *mut KlPadic) -> KlStatus {
    padic_binop(a, b, out, PadicNum::mul)
}

/// Writes the valuation. `*exact` is set to false when `x` is zero to its
/// precision, in which case `*out` holds a lower bound. An exact zero
/// reports `INT64_MAX`.
///
/// # Safety
/// `x` must be a live handle; `out` and `exact` must be writable pointers.
#[no_mangle]
pub unsafe extern "C" fn kl_padic_valuation(x: *const KlPadic, out: *mut i64, exact: *mut bool) -> KlStatus {
    guard(|| {
        let x = &ref_arg(x, "x")?.0;
        let v = x.valuation();
        let (v, is_exact) = match v {
            Valuation::Infinite => (i64::MAX, true),
            Valuation::Exact(b) => (b, true),
            Valuation::AtLeast(b) => (b, false),
        };
        write_out(out, v)?;
        write_out(exact, is_exact)
    })
}

/// Writes the JSON form of `x`.
///
/// # Safety
/// `x` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn kl_padic_to_json(x: *const KlPadic, out: *mut *mut c_char) -> KlStatus {
    guard(|| write_string(out, json(&ref_arg(x, "x")?.0)?))
}
