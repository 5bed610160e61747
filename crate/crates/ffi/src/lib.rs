//! C ABI for `bellswap`.
//!
//! - Every fallible function returns a `BELLSWAP_*` status code, `0` on success.
//! - The message for the last failure on the calling thread is available
//!   through [`bellswap_last_error_message`].
//! - Orbital matrices and measurement results are opaque heap handles,
//!   released with their `_free` function. Passing null to `_free` is a no-op.
//! - Panics never cross the boundary; they surface as `BELLSWAP_PANIC`.
//!
//! # Safety
//!
//! Pointer arguments must be non-null and valid for the stated length unless
//! documented otherwise, and handles must come from this library and not be
//! used after being freed.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bellswap::protocol::{self, PostState};
use bellswap::{models, slater, Backend, ChainSpec, Complex64, Error, OrbitalMatrix, ProtocolResult, RungProjector};
use nalgebra::DMatrix;

pub const BELLSWAP_OK: i32 = 0;
pub const BELLSWAP_NULL_POINTER: i32 = 1;
pub const BELLSWAP_PRECONDITION: i32 = 2;
pub const BELLSWAP_CAPACITY: i32 = 3;
pub const BELLSWAP_INDEX_OUT_OF_RANGE: i32 = 4;
pub const BELLSWAP_SIZE_MISMATCH: i32 = 5;
pub const BELLSWAP_COMPOSITION_SINGULAR: i32 = 6;
pub const BELLSWAP_DEGENERATE_FERMI_LEVEL: i32 = 7;
pub const BELLSWAP_DOMAIN: i32 = 8;
pub const BELLSWAP_CONFIG: i32 = 9;
/// The requested quantity does not exist for this result.
pub const BELLSWAP_UNAVAILABLE: i32 = 10;
pub const BELLSWAP_BUFFER_TOO_SMALL: i32 = 11;
pub const BELLSWAP_PANIC: i32 = 99;

pub const BELLSWAP_BACKEND_ORACLE: i32 = 0;
pub const BELLSWAP_BACKEND_GAUSSIAN: i32 = 1;

/// `N × L` orbital matrix of a Slater determinant.
pub struct BellswapOrbitals(OrbitalMatrix);

/// Outcome of one post-selected measurement.
pub struct BellswapResult(ProtocolResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) => BELLSWAP_PRECONDITION,
        Error::Capacity { .. } => BELLSWAP_CAPACITY,
        Error::IndexOutOfRange { .. } => BELLSWAP_INDEX_OUT_OF_RANGE,
        Error::SizeMismatch(_) => BELLSWAP_SIZE_MISMATCH,
        Error::CompositionSingular { .. } => BELLSWAP_COMPOSITION_SINGULAR,
        Error::DegenerateFermiLevel { .. } => BELLSWAP_DEGENERATE_FERMI_LEVEL,
        Error::Domain(_) => BELLSWAP_DOMAIN,
        Error::Config(_) => BELLSWAP_CONFIG,
    }
}

enum Fail {
    Lib(Error),
    Code(i32, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn null() -> Fail {
    Fail::Code(BELLSWAP_NULL_POINTER, "null pointer argument".into())
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BELLSWAP_OK,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            code(&e)
        }
        Ok(Err(Fail::Code(c, msg))) => {
            set_error(msg);
            c
        }
        Err(_) => {
            set_error("internal panic".into());
            BELLSWAP_PANIC
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null())
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

fn backend(b: i32) -> Result<Backend, Fail> {
    match b {
        BELLSWAP_BACKEND_ORACLE => Ok(Backend::Oracle),
        BELLSWAP_BACKEND_GAUSSIAN => Ok(Backend::Gaussian),
        _ => Err(Fail::Code(BELLSWAP_PRECONDITION, format!("unknown backend {b}"))),
    }
}

/// Message of the last failure on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bellswap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Haar-random `n`-particle Slater determinant on `l` sites.
#[no_mangle]
pub unsafe extern "C" fn bellswap_orbitals_random(l: usize, n: usize, seed: u64, out: *mut *mut BellswapOrbitals) -> i32 {
    guard(|| {
        let phi = models::random_slater(l, n, seed)?;
        write(out, Box::into_raw(Box::new(BellswapOrbitals(phi))))
    })
}

/// Half-filled ground state of the open chain with staggered mass `m0`.
#[no_mangle]
pub unsafe extern "C" fn bellswap_orbitals_ground_state(l: usize, m0: f64, out: *mut *mut BellswapOrbitals) -> i32 {
    guard(|| {
        let phi = models::ground_state_orbitals(&ChainSpec::half_filled(l, m0)?)?;
        write(out, Box::into_raw(Box::new(BellswapOrbitals(phi))))
    })
}

/// Orbital matrix from row-major real and imaginary parts of length `n * l`.
/// `im` may be null for a real matrix. Rows must be orthonormal.
#[no_mangle]
pub unsafe extern "C" fn bellswap_orbitals_new(
    n: usize,
    l: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut BellswapOrbitals,
) -> i32 {
    guard(|| {
        let len = n.checked_mul(l).ok_or_else(|| Fail::Code(BELLSWAP_SIZE_MISMATCH, "n * l overflows".into()))?;
        let re = slice(re, len)?;
        let im = if im.is_null() { None } else { Some(slice(im, len)?) };
        let m = DMatrix::from_fn(n, l, |r, c| {
            let k = r * l + c;
            Complex64::new(re[k], im.map_or(0.0, |v| v[k]))
        });
        let phi = OrbitalMatrix::new(m)?;
        write(out, Box::into_raw(Box::new(BellswapOrbitals(phi))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bellswap_orbitals_free(h: *mut BellswapOrbitals) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Particle number and number of sites.
#[no_mangle]
pub unsafe extern "C" fn bellswap_orbitals_shape(h: *const BellswapOrbitals, n: *mut usize, l: *mut usize) -> i32 {
    guard(|| {
        let phi = &handle(h)?.0;
        write(n, phi.n())?;
        write(l, phi.l())
    })
}

/// `P = |Δ_{A_L} Δ_{A_R}|²` for the uniform `|+⟩` outcome on `a_left`.
#[no_mangle]
pub unsafe extern "C" fn bellswap_postselect_probability(
    h: *const BellswapOrbitals,
    a_left: *const usize,
    len: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let p = slater::postselect_probability(&handle(h)?.0, slice(a_left, len)?)?;
        write(out, p.probability)
    })
}

/// `log P` from the entanglement spectrum of the sites `a_left`.
#[no_mangle]
pub unsafe extern "C" fn bellswap_log_probability_from_spectrum(
    h: *const BellswapOrbitals,
    a_left: *const usize,
    len: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let c = slater::correlation_submatrix(&handle(h)?.0, slice(a_left, len)?)?;
        write(out, slater::log_probability_from_spectrum(&slater::entanglement_spectrum(&c)?))
    })
}

/// Post-select every rung in `measured` of `upper ⊗ lower` on the
/// single-particle rung state `(α c_i† + β c_ī†)|vac⟩`, with `|α|² + |β|² = 1`.
#[no_mangle]
pub unsafe extern "C" fn bellswap_run_measurement(
    upper: *const BellswapOrbitals,
    lower: *const BellswapOrbitals,
    measured: *const usize,
    len: usize,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    backend_id: i32,
    out: *mut *mut BellswapResult,
) -> i32 {
    guard(|| {
        let proj = RungProjector::new(Complex64::new(alpha_re, alpha_im), Complex64::new(beta_re, beta_im))?;
        let r = protocol::run_measurement(
            &handle(upper)?.0,
            &handle(lower)?.0,
            slice(measured, len)?,
            &proj,
            backend(backend_id)?,
        )?;
        write(out, Box::into_raw(Box::new(BellswapResult(r))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn bellswap_result_free(h: *mut BellswapResult) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

#[no_mangle]
pub unsafe extern "C" fn bellswap_result_probability(h: *const BellswapResult, out: *mut f64) -> i32 {
    guard(|| write(out, handle(h)?.0.probability))
}

#[no_mangle]
pub unsafe extern "C" fn bellswap_result_log_probability(h: *const BellswapResult, out: *mut f64) -> i32 {
    guard(|| write(out, handle(h)?.0.log_probability))
}

/// Entropy in nats of the unmeasured upper-layer sites. `BELLSWAP_UNAVAILABLE`
/// for zero-probability outcomes or when every rung was measured.
#[no_mangle]
pub unsafe extern "C" fn bellswap_result_entropy(h: *const BellswapResult, out: *mut f64) -> i32 {
    guard(|| {
        let s = handle(h)?
            .0
            .entropy_ar()
            .ok_or_else(|| Fail::Code(BELLSWAP_UNAVAILABLE, "no post-measurement state".into()))?;
        write(out, s)
    })
}

/// Fidelity to the ideal rung product; defined only for half-system outcomes.
#[no_mangle]
pub unsafe extern "C" fn bellswap_result_fidelity(h: *const BellswapResult, out: *mut f64) -> i32 {
    guard(|| {
        let f = handle(h)?
            .0
            .fidelity_to_ideal
            .ok_or_else(|| Fail::Code(BELLSWAP_UNAVAILABLE, "fidelity needs a half-system outcome".into()))?;
        write(out, f)
    })
}

/// Real Majorana correlation matrix `R` of the post-measurement state,
/// written row-major into `buf` (capacity `cap`). `dim` receives the side
/// length `4L` even when the buffer is too small.
#[no_mangle]
pub unsafe extern "C" fn bellswap_result_majorana(
    h: *const BellswapResult,
    buf: *mut f64,
    cap: usize,
    dim: *mut usize,
) -> i32 {
    guard(|| {
        let r = match &handle(h)?.0.post {
            Some(PostState::Gaussian(g)) => g.r().clone(),
            Some(PostState::Fock(psi)) => psi.majorana_r()?,
            None => return Err(Fail::Code(BELLSWAP_UNAVAILABLE, "no post-measurement state".into())),
        };
        let d = r.nrows();
        write(dim, d)?;
        if cap < d * d {
            return Err(Fail::Code(BELLSWAP_BUFFER_TOO_SMALL, format!("need {} entries, got {cap}", d * d)));
        }
        if buf.is_null() {
            return Err(null());
        }
        let out = std::slice::from_raw_parts_mut(buf, d * d);
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = r[(i, j)];
            }
        }
        Ok(())
    })
}

/// Complete elliptic integral of the first kind, modulus `k`.
#[no_mangle]
pub unsafe extern "C" fn bellswap_elliptic_k(k: f64, out: *mut f64) -> i32 {
    guard(|| write(out, models::elliptic_k(k)?))
}

/// Entanglement level spacing of the half chain with staggered mass `m0`.
#[no_mangle]
pub unsafe extern "C" fn bellswap_eisler_level_spacing(m0: f64, out: *mut f64) -> i32 {
    guard(|| write(out, models::eisler_level_spacing(m0)?))
}
