//! C ABI over `mspace`.
//!
//! Every fallible call returns an `MspaceStatus` and writes results through
//! out-pointers. The message of the last failure on the calling thread is
//! available from `mspace_last_error`. Handles are opaque and owned by the
//! caller; release them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use mspace::classify::{is_tho, is_tto, sedlock_class, SedlockMembership};
use mspace::harness::{run_suite, SuiteConfig};
use mspace::json::{parse_inner, parse_symbol};
use mspace::operators::{tho_matrix, tto_matrix};
use mspace::{ClarkData, Error, ExtendedScalar, InnerFunction, ModelSpace, OperatorMatrix};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MspaceStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON, unknown names, bad ranges.
    Input = 3,
    /// Zeros outside the disk, poles on the circle, points off the domain.
    Domain = 4,
    NoConvergence = 5,
    SpaceMismatch = 6,
    Singular = 7,
    /// A requested certificate or class membership does not hold.
    NotMember = 8,
    BufferTooSmall = 9,
    Numerical = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MspaceSedlock {
    None = 0,
    All = 1,
    Finite = 2,
    Infinity = 3,
}

/// A model space `K_u`.
pub struct MspaceSpace(Arc<ModelSpace>);

/// A matrix of a (possibly asymmetric) operator between model spaces.
pub struct MspaceOperator(OperatorMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn status_of(e: &Error) -> MspaceStatus {
    match e {
        Error::Input(_) | Error::InvalidRange(_) => MspaceStatus::Input,
        Error::ZeroOnOrOutsideCircle { .. }
        | Error::NotUnimodular { .. }
        | Error::ConstantInnerFunction
        | Error::PoleHit { .. }
        | Error::OutOfDomain { .. }
        | Error::PoleNearCircle { .. }
        | Error::SingularDenominator
        | Error::NotRealSymmetric
        | Error::ZeroAnchor => MspaceStatus::Domain,
        Error::NoConvergence { .. } => MspaceStatus::NoConvergence,
        Error::SpaceMismatch => MspaceStatus::SpaceMismatch,
        Error::Singular { .. } | Error::DegenerateSpectrum { .. } => MspaceStatus::Singular,
        Error::NotTto | Error::NotTho | Error::SymbolNotInClass { .. } | Error::NoCertificate { .. } => MspaceStatus::NotMember,
        Error::SymbolRecoveryFailed(_) | Error::Linalg(_) | Error::IdentityViolation { .. } => MspaceStatus::Numerical,
    }
}

struct Failure(MspaceStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail(status: MspaceStatus, what: &str) -> Failure {
    Failure(status, what.to_string())
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MspaceStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MspaceStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MspaceStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(MspaceStatus::NullPointer, what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(MspaceStatus::InvalidUtf8, what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(MspaceStatus::NullPointer, what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(fail(MspaceStatus::NullPointer, what));
    }
    out.write(value);
    Ok(())
}

/// Boxes `value` into `out`, checking `out` first so nothing leaks.
unsafe fn give<T>(out: *mut *mut T, value: T, what: &str) -> Result<(), Failure> {
    put(out, ptr::null_mut(), what)?;
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| fail(MspaceStatus::Numerical, "string contains NUL"))
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn mspace_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn mspace_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mspace_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds `K_u` for `u = constant * prod b_{a_k}`. `zeros` holds `n_zeros`
/// interleaved (re, im) pairs.
///
/// # Safety
/// `zeros` must point to `2 * n_zeros` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mspace_space_new(
    zeros: *const f64,
    n_zeros: usize,
    constant_re: f64,
    constant_im: f64,
    out: *mut *mut MspaceSpace,
) -> MspaceStatus {
    guard(|| {
        if zeros.is_null() && n_zeros > 0 {
            return Err(fail(MspaceStatus::NullPointer, "zeros"));
        }
        let raw = if n_zeros == 0 { &[][..] } else { std::slice::from_raw_parts(zeros, 2 * n_zeros) };
        let zeros = raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let inner = InnerFunction::new(zeros, Complex64::new(constant_re, constant_im))?;
        let space = ModelSpace::new(inner)?;
        give(out, MspaceSpace(space), "out")
    })
}

/// Builds `K_u` from `"zN"` or inner-function JSON.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mspace_space_parse(spec: *const c_char, out: *mut *mut MspaceSpace) -> MspaceStatus {
    guard(|| {
        let inner = parse_inner(text(spec, "spec")?)?;
        give(out, MspaceSpace(ModelSpace::new(inner)?), "out")
    })
}

/// # Safety
/// `space` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn mspace_space_dim(space: *const MspaceSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `space` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mspace_space_free(space: *mut MspaceSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

unsafe fn build_op(
    u: *const MspaceSpace,
    v: *const MspaceSpace,
    symbol: *const c_char,
    hankel: bool,
    out: *mut *mut MspaceOperator,
) -> MspaceStatus {
    guard(|| {
        let (u, v) = (handle(u, "u")?, handle(v, "v")?);
        let phi = parse_symbol(text(symbol, "symbol")?)?;
        let op = if hankel { tho_matrix(&u.0, &v.0, &phi)? } else { tto_matrix(&u.0, &v.0, &phi)? };
        give(out, MspaceOperator(op), "out")
    })
}

/// `A_phi` from `K_u` to `K_v`; `symbol` is rational-symbol JSON.
///
/// # Safety
/// `u`, `v` live handles, `symbol` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mspace_tto_new(
    u: *const MspaceSpace,
    v: *const MspaceSpace,
    symbol: *const c_char,
    out: *mut *mut MspaceOperator,
) -> MspaceStatus {
    build_op(u, v, symbol, false, out)
}

/// `B_phi` from `K_u` to `K_v`.
///
/// # Safety
/// As for `mspace_tto_new`.
#[no_mangle]
pub unsafe extern "C" fn mspace_tho_new(
    u: *const MspaceSpace,
    v: *const MspaceSpace,
    symbol: *const c_char,
    out: *mut *mut MspaceOperator,
) -> MspaceStatus {
    build_op(u, v, symbol, true, out)
}

/// Wraps a row-major matrix of interleaved (re, im) entries as a linear
/// operator from `K_u` to `K_v`.
///
/// # Safety
/// `entries` must hold `2 * dim(v) * dim(u)` doubles.
#[no_mangle]
pub unsafe extern "C" fn mspace_operator_from_entries(
    u: *const MspaceSpace,
    v: *const MspaceSpace,
    entries: *const f64,
    out: *mut *mut MspaceOperator,
) -> MspaceStatus {
    guard(|| {
        let (u, v) = (handle(u, "u")?, handle(v, "v")?);
        if entries.is_null() {
            return Err(fail(MspaceStatus::NullPointer, "entries"));
        }
        let (m, n) = (v.0.dim(), u.0.dim());
        let raw = std::slice::from_raw_parts(entries, 2 * m * n);
        let matrix = mspace::CMatrix::from_fn(m, n, |i, j| Complex64::new(raw[2 * (i * n + j)], raw[2 * (i * n + j) + 1]));
        let op = OperatorMatrix::linear(matrix, u.0.clone(), v.0.clone())?;
        give(out, MspaceOperator(op), "out")
    })
}

/// # Safety
/// `op` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn mspace_operator_rows(op: *const MspaceOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.matrix().rows())
}

/// # Safety
/// `op` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn mspace_operator_cols(op: *const MspaceOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.matrix().cols())
}

/// Copies the matrix row-major as interleaved (re, im) into `buf`, which must
/// hold `2 * rows * cols` doubles.
///
/// # Safety
/// `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mspace_operator_entries(op: *const MspaceOperator, buf: *mut f64, len: usize) -> MspaceStatus {
    guard(|| {
        let m = handle(op, "op")?.0.matrix();
        let need = 2 * m.rows() * m.cols();
        if buf.is_null() {
            return Err(fail(MspaceStatus::NullPointer, "buf"));
        }
        if len < need {
            return Err(Failure(MspaceStatus::BufferTooSmall, format!("need {need} doubles, got {len}")));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let z = m[(i, j)];
                let k = 2 * (i * m.cols() + j);
                out[k] = z.re;
                out[k + 1] = z.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `op` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mspace_operator_free(op: *mut MspaceOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Truncated Toeplitz membership with its displacement and rebuild residuals.
///
/// # Safety
/// `op` live; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn mspace_is_tto(
    op: *const MspaceOperator,
    tol: f64,
    member: *mut bool,
    displacement_residual: *mut f64,
    rebuild_residual: *mut f64,
) -> MspaceStatus {
    guard(|| {
        let r = is_tto(&handle(op, "op")?.0, tol)?;
        put(member, r.member, "member")?;
        put(displacement_residual, r.displacement_residual, "displacement_residual")?;
        put(rebuild_residual, r.rebuild_residual, "rebuild_residual")
    })
}

/// Truncated Hankel membership.
///
/// # Safety
/// `op` live; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn mspace_is_tho(
    op: *const MspaceOperator,
    tol: f64,
    member: *mut bool,
    displacement_residual: *mut f64,
    rebuild_residual: *mut f64,
) -> MspaceStatus {
    guard(|| {
        let r = is_tho(&handle(op, "op")?.0, tol)?;
        put(member, r.member, "member")?;
        put(displacement_residual, r.displacement_residual, "displacement_residual")?;
        put(rebuild_residual, r.rebuild_residual, "rebuild_residual")
    })
}

/// Sedlock class of an endomorphism. `alpha` is written only for
/// `MspaceSedlock::Finite`.
///
/// # Safety
/// `op` live; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn mspace_sedlock_class(
    op: *const MspaceOperator,
    tol: f64,
    membership: *mut MspaceSedlock,
    alpha_re: *mut f64,
    alpha_im: *mut f64,
) -> MspaceStatus {
    guard(|| {
        let r = sedlock_class(&handle(op, "op")?.0, tol)?;
        let kind = match r.membership {
            SedlockMembership::None => MspaceSedlock::None,
            SedlockMembership::All => MspaceSedlock::All,
            SedlockMembership::Finite => MspaceSedlock::Finite,
            SedlockMembership::Infinity => MspaceSedlock::Infinity,
        };
        put(membership, kind, "membership")?;
        if let Some(ExtendedScalar::Finite(a)) = r.alpha {
            put(alpha_re, a.re, "alpha_re")?;
            put(alpha_im, a.im, "alpha_im")?;
        }
        Ok(())
    })
}

/// Clark points (interleaved re, im) and weights for `|alpha| = 1`. Both
/// buffers need `dim(u)` slots (points twice that).
///
/// # Safety
/// `points` writable for `2 * len` doubles, `weights` for `len`.
#[no_mangle]
pub unsafe extern "C" fn mspace_clark(
    space: *const MspaceSpace,
    alpha_re: f64,
    alpha_im: f64,
    points: *mut f64,
    weights: *mut f64,
    len: usize,
) -> MspaceStatus {
    guard(|| {
        let sp = handle(space, "space")?;
        if points.is_null() || weights.is_null() {
            return Err(fail(MspaceStatus::NullPointer, "points or weights"));
        }
        let n = sp.0.dim();
        if len < n {
            return Err(Failure(MspaceStatus::BufferTooSmall, format!("need {n} slots, got {len}")));
        }
        let clark = ClarkData::compute(&sp.0, Complex64::new(alpha_re, alpha_im))?;
        let (p, w) = (std::slice::from_raw_parts_mut(points, 2 * n), std::slice::from_raw_parts_mut(weights, n));
        for (k, (z, wt)) in clark.points.iter().zip(&clark.weights).enumerate() {
            p[2 * k] = z.re;
            p[2 * k + 1] = z.im;
            w[k] = *wt;
        }
        Ok(())
    })
}

/// Runs the verification suite and returns the JSON report in `report`
/// (free with `mspace_string_free`). `trials = 0` keeps every check's
/// default; `filter` is NULL or a comma-separated list of ids and groups.
/// `passed` tells whether every selected check passed.
///
/// # Safety
/// `filter` NULL or NUL-terminated; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn mspace_verify_suite(
    seed: u64,
    trials: usize,
    filter: *const c_char,
    passed: *mut bool,
    report: *mut *mut c_char,
) -> MspaceStatus {
    guard(|| {
        let filter = if filter.is_null() {
            Vec::new()
        } else {
            text(filter, "filter")?.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
        };
        let config = SuiteConfig { seed, trials: (trials > 0).then_some(trials), filter, ..SuiteConfig::default() };
        let r = run_suite(&config)?;
        let json = serde_json::to_string(&r).map_err(|e| Failure(MspaceStatus::Numerical, e.to_string()))?;
        put(report, ptr::null_mut(), "report")?;
        put(passed, r.passed, "passed")?;
        put(report, owned_string(json)?, "report")
    })
}
