//! C ABI for the pairing/AGP toolkit: opaque handles, integer error
//! codes, and flat-buffer outputs so other languages can bind without
//! touching Rust types.

use std::cell::RefCell;
use std::os::raw::c_char;

use agpq::agp_classical::{
    agp_energy, find_critical_g, hf_energy, init_geminals, optimize_geminals, GeminalState,
};
use agpq::error::AgpqError;
use agpq::exact::ed_ground_state;
use agpq::pair_model::PairingModel;
use agpq::projection::{EstimatorConfig, EstimatorMode};
use agpq::vqe::minimize;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgpqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConvergenceFailure = 3,
    DimensionLimit = 4,
    InternalError = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(err: AgpqError) -> AgpqStatus {
    let status = match &err {
        AgpqError::InvalidArgument(_) | AgpqError::Config(_) => AgpqStatus::InvalidArgument,
        AgpqError::ConvergenceFailure(_) => AgpqStatus::ConvergenceFailure,
        AgpqError::DimensionLimit { .. } => AgpqStatus::DimensionLimit,
        _ => AgpqStatus::InternalError,
    };
    LAST_ERROR.with(|slot| *slot.borrow_mut() = err.to_string());
    status
}

/// Opaque pairing-model handle.
pub struct AgpqModel {
    inner: PairingModel,
}

/// Opaque geminal-coefficient handle.
pub struct AgpqGeminals {
    inner: GeminalState,
}

/// Copies the most recent error message (UTF-8, NUL-terminated) into
/// `buf`; returns the full message length in bytes, excluding the NUL.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn agpq_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Creates a pairing model with levels eps_p = p * delta_eps, coupling
/// `g`, and `n` pairs on `m` levels. On success writes the handle to
/// `out`; free with `agpq_model_free`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn agpq_model_new(
    m: usize,
    n: usize,
    delta_eps: f64,
    g: f64,
    out: *mut *mut AgpqModel,
) -> AgpqStatus {
    if out.is_null() {
        return AgpqStatus::NullPointer;
    }
    match PairingModel::new(m, n, delta_eps, g) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(AgpqModel { inner }));
            AgpqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a model handle; null is a no-op.
///
/// # Safety
/// `model` must come from `agpq_model_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn agpq_model_free(model: *mut AgpqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Mean-field (uncorrelated) reference energy.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn agpq_hf_energy(model: *const AgpqModel, out: *mut f64) -> AgpqStatus {
    if model.is_null() || out.is_null() {
        return AgpqStatus::NullPointer;
    }
    *out = hf_energy(&(*model).inner);
    AgpqStatus::Ok
}

/// Critical coupling where the mean field first develops a gap.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn agpq_critical_g(model: *const AgpqModel, out: *mut f64) -> AgpqStatus {
    if model.is_null() || out.is_null() {
        return AgpqStatus::NullPointer;
    }
    match find_critical_g(&(*model).inner) {
        Ok(gc) => {
            *out = gc;
            AgpqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Exact (seniority-zero full CI) ground-state energy.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn agpq_exact_ground_energy(
    model: *const AgpqModel,
    out: *mut f64,
) -> AgpqStatus {
    if model.is_null() || out.is_null() {
        return AgpqStatus::NullPointer;
    }
    match ed_ground_state(&(*model).inner) {
        Ok(r) => {
            *out = r.ground_energy;
            AgpqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Optimizes the geminal coefficients classically; writes a handle to
/// `out`, freed with `agpq_geminals_free`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn agpq_optimize_agp(
    model: *const AgpqModel,
    out: *mut *mut AgpqGeminals,
) -> AgpqStatus {
    if model.is_null() || out.is_null() {
        return AgpqStatus::NullPointer;
    }
    let m = &(*model).inner;
    match optimize_geminals(m, &init_geminals(m)) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(AgpqGeminals { inner }));
            AgpqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a geminal handle; null is a no-op.
///
/// # Safety
/// `geminals` must come from `agpq_optimize_agp` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn agpq_geminals_free(geminals: *mut AgpqGeminals) {
    if !geminals.is_null() {
        drop(Box::from_raw(geminals));
    }
}

/// Copies the geminal coefficients into `buf` (capacity `len`); returns
/// the level count via the function result semantics of
/// `agpq_last_error_message` (full length, truncated copy).
///
/// # Safety
/// `geminals` must be valid; `buf` must point to `len` doubles or be null.
#[no_mangle]
pub unsafe extern "C" fn agpq_geminals_eta(
    geminals: *const AgpqGeminals,
    buf: *mut f64,
    len: usize,
) -> usize {
    if geminals.is_null() {
        return 0;
    }
    let eta = &(*geminals).inner.eta;
    if !buf.is_null() {
        let n = eta.len().min(len);
        std::ptr::copy_nonoverlapping(eta.as_ptr(), buf, n);
    }
    eta.len()
}

/// Variational AGP energy of the given geminals under the model.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn agpq_agp_energy(
    geminals: *const AgpqGeminals,
    model: *const AgpqModel,
    out: *mut f64,
) -> AgpqStatus {
    if geminals.is_null() || model.is_null() || out.is_null() {
        return AgpqStatus::NullPointer;
    }
    match agp_energy(&(*geminals).inner, &(*model).inner) {
        Ok(e) => {
            *out = e;
            AgpqStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Runs the projected VQE over the pair-hopper angles starting from the
/// given geminals. Writes the optimized energy and, optionally, the
/// iteration count.
///
/// # Safety
/// `geminals`, `model`, and `out_energy` must be valid pointers;
/// `out_iterations` may be null.
#[no_mangle]
pub unsafe extern "C" fn agpq_vqe_minimize(
    geminals: *const AgpqGeminals,
    model: *const AgpqModel,
    restarts: usize,
    seed: u64,
    out_energy: *mut f64,
    out_iterations: *mut usize,
) -> AgpqStatus {
    if geminals.is_null() || model.is_null() || out_energy.is_null() {
        return AgpqStatus::NullPointer;
    }
    let cfg = EstimatorConfig {
        mode: EstimatorMode::Exact,
        shots_per_term: 1,
        seed,
    };
    match minimize(&(*geminals).inner, &(*model).inner, &cfg, None, restarts) {
        Ok(r) => {
            *out_energy = r.energy;
            if !out_iterations.is_null() {
                *out_iterations = r.iterations;
            }
            AgpqStatus::Ok
        }
        Err(e) => fail(e),
    }
}
