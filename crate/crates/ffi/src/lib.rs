//! C ABI over `skcw`.
//!
//! Every fallible function returns an [`SkcwStatus`] and writes its result
//! through an out pointer. On failure a message is kept per thread and can be
//! read with [`skcw_last_error_message`]. Matrices are opaque handles owned by
//! the caller and released with [`skcw_matrix_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use skcw::combinat::catalan_psi;
use skcw::cycles::{chebyshev_lss, signed_cycle_bruteforce};
use skcw::gibbs::{clt_targets, curie_weiss_tau, exact_log_partition, second_moment_target, ModelParams};
use skcw::randmat::{sample_gaussian_matrix, sample_tilted_matrix, SeedSpec, SpinVector, SymMatrix};
use skcw::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkcwStatus {
    Ok = 0,
    NullPointer = 1,
    Precondition = 2,
    Overflow = 3,
    BoundExceeded = 4,
    BudgetExceeded = 5,
    RegimeViolation = 6,
    DimensionMismatch = 7,
    NonFinite = 8,
    NotHollow = 9,
    Parse = 10,
    Io = 11,
    Panic = 12,
}

/// Opaque symmetric matrix.
pub struct SkcwMatrix {
    inner: SymMatrix,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SkcwCltTargets {
    pub f_limit: f64,
    pub f1: f64,
    pub alpha1: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> SkcwStatus {
    match e {
        Error::Overflow(_) => SkcwStatus::Overflow,
        Error::BoundExceeded { .. } => SkcwStatus::BoundExceeded,
        Error::Precondition(_) => SkcwStatus::Precondition,
        Error::DimensionMismatch { .. } => SkcwStatus::DimensionMismatch,
        Error::BudgetExceeded { .. } => SkcwStatus::BudgetExceeded,
        Error::RegimeViolation { .. } => SkcwStatus::RegimeViolation,
        Error::NonFinite(_) => SkcwStatus::NonFinite,
        Error::NotHollow => SkcwStatus::NotHollow,
        Error::Parse(_) => SkcwStatus::Parse,
        Error::Io(_) => SkcwStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SkcwStatus>) -> SkcwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            SkcwStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_last_error("panic inside skcw");
            SkcwStatus::Panic
        }
    }
}

trait IntoStatus<T> {
    fn status(self) -> Result<T, SkcwStatus>;
}

impl<T> IntoStatus<T> for skcw::Result<T> {
    fn status(self) -> Result<T, SkcwStatus> {
        self.map_err(|e| {
            set_last_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn null_error(what: &str) -> SkcwStatus {
    set_last_error(&format!("null pointer: {what}"));
    SkcwStatus::NullPointer
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), SkcwStatus> {
    if out.is_null() {
        return Err(null_error("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn matrix_ref<'a>(m: *const SkcwMatrix) -> Result<&'a SymMatrix, SkcwStatus> {
    m.as_ref().map(|m| &m.inner).ok_or_else(|| null_error("matrix"))
}

fn boxed(inner: SymMatrix) -> *mut SkcwMatrix {
    Box::into_raw(Box::new(SkcwMatrix { inner }))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this
/// thread.
#[no_mangle]
pub extern "C" fn skcw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn skcw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Samples an `n x n` symmetric Gaussian matrix from stream `stream_id`
/// under `master_seed`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn skcw_matrix_sample(
    n: usize,
    master_seed: u64,
    stream_id: u64,
    hollow: bool,
    out: *mut *mut SkcwMatrix,
) -> SkcwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_error("out"));
        }
        let a = sample_gaussian_matrix(n, SeedSpec::new(master_seed, stream_id), hollow).status()?;
        write_out(out, boxed(a))
    })
}

/// Samples a planted matrix for the spin configuration `signs[0..n]`
/// (entries +1 or -1).
///
/// # Safety
/// `signs` must point to `n` readable bytes and `out` to writable storage
/// for one handle.
#[no_mangle]
pub unsafe extern "C" fn skcw_matrix_sample_tilted(
    n: usize,
    signs: *const i8,
    beta: f64,
    master_seed: u64,
    stream_id: u64,
    out: *mut *mut SkcwMatrix,
) -> SkcwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_error("out"));
        }
        if signs.is_null() {
            return Err(null_error("signs"));
        }
        let sigma = SpinVector::new(std::slice::from_raw_parts(signs, n).to_vec()).status()?;
        let a = sample_tilted_matrix(n, &sigma, beta, SeedSpec::new(master_seed, stream_id)).status()?;
        write_out(out, boxed(a))
    })
}

/// Builds a matrix from its upper triangle listed row by row, diagonal
/// included (`len = n (n + 1) / 2`).
///
/// # Safety
/// `upper` must point to `len` readable doubles and `out` to writable
/// storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn skcw_matrix_from_upper(
    n: usize,
    upper: *const f64,
    len: usize,
    out: *mut *mut SkcwMatrix,
) -> SkcwStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_error("out"));
        }
        if upper.is_null() {
            return Err(null_error("upper"));
        }
        let a = SymMatrix::from_upper(n, std::slice::from_raw_parts(upper, len)).status()?;
        write_out(out, boxed(a))
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn skcw_matrix_free(m: *mut SkcwMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the matrix, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn skcw_matrix_dim(m: *const SkcwMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.n())
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skcw_matrix_get(m: *const SkcwMatrix, i: usize, j: usize, out: *mut f64) -> SkcwStatus {
    guard(|| {
        let a = matrix_ref(m)?;
        if i >= a.n() || j >= a.n() {
            set_last_error(&format!("index ({i}, {j}) out of range for dimension {}", a.n()));
            return Err(SkcwStatus::Precondition);
        }
        write_out(out, a.get(i, j))
    })
}

/// Exact `log Z_n(beta)` of the model with couplings `m`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skcw_log_partition(
    m: *const SkcwMatrix,
    beta: f64,
    j: f64,
    j_prime: f64,
    out: *mut f64,
) -> SkcwStatus {
    guard(|| {
        let a = matrix_ref(m)?;
        let params = ModelParams::new(beta, j, j_prime, a.n()).status()?;
        write_out(out, exact_log_partition(a, &params).status()?)
    })
}

/// Signed cycle statistic `C_{n,k}` for `2 <= k <= n`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skcw_signed_cycle(m: *const SkcwMatrix, k: usize, out: *mut f64) -> SkcwStatus {
    guard(|| {
        let a = matrix_ref(m)?;
        write_out(out, signed_cycle_bruteforce(a, k).status()?)
    })
}

/// `Tr P_k(A / sqrt(n))` for a hollow matrix.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn skcw_chebyshev_lss(m: *const SkcwMatrix, k: usize, out: *mut f64) -> SkcwStatus {
    guard(|| {
        let a = matrix_ref(m)?;
        write_out(out, chebyshev_lss(a, k).status()?)
    })
}

/// Limit-law parameters of `n (F_n - beta^2)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn skcw_clt_targets(beta: f64, j: f64, j_prime: f64, out: *mut SkcwCltTargets) -> SkcwStatus {
    guard(|| {
        let params = ModelParams::new(beta, j, j_prime, 1).status()?;
        let t = clt_targets(&params).status()?;
        write_out(
            out,
            SkcwCltTargets {
                f_limit: t.f_limit,
                f1: t.f1,
                alpha1: t.alpha1,
            },
        )
    })
}

/// Curie-Weiss normaliser `tau_n(beta J)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn skcw_curie_weiss_tau(n: usize, beta_j: f64, out: *mut f64) -> SkcwStatus {
    guard(|| {
        if n < 1 || !(0.0..0.5).contains(&beta_j) {
            set_last_error(&format!(
                "need n >= 1 and 0 <= beta*J < 1/2, got n = {n}, beta*J = {beta_j}"
            ));
            return Err(SkcwStatus::Precondition);
        }
        write_out(out, curie_weiss_tau(n, beta_j))
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn skcw_second_moment_target(beta: f64, out: *mut f64) -> SkcwStatus {
    guard(|| write_out(out, second_moment_target(beta).status()?))
}

/// `psi_k`: Catalan number `C_{k/2}` for even `k`, zero for odd `k`.
/// Fails with `Overflow` when the value does not fit in 64 bits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn skcw_catalan_psi(k: u32, out: *mut i64) -> SkcwStatus {
    guard(|| {
        let v = catalan_psi(k).status()?;
        let v = i64::try_from(v).map_err(|_| {
            set_last_error(&format!("psi_{k} does not fit in 64 bits"));
            SkcwStatus::Overflow
        })?;
        write_out(out, v)
    })
}
