//! C ABI for the cfaoi library: opaque parameter handles, scalar analysis
//! entry points, and error codes matching the CLI exit classes
//! (0 ok, 2 config, 3 numerical, 4 infeasible).
//!
//! Every function is safe to call from any thread; the last error message is
//! stored per thread and stays valid until the next failing call on that
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use cfaoi::montecarlo::{self, McOptions};
use cfaoi::numerics::QuadratureSpec;
use cfaoi::optimizer;
use cfaoi::params::SystemParameters;
use cfaoi::{comm, sensing, snc};

/// Opaque handle to a normalized parameter set.
pub struct CfaoiParams {
    inner: SystemParameters,
}

pub const CFAOI_OK: i32 = 0;
pub const CFAOI_ERR_CONFIG: i32 = 2;
pub const CFAOI_ERR_NUMERICAL: i32 = 3;
pub const CFAOI_ERR_INFEASIBLE: i32 = 4;
/// Null pointer or invalid argument at the ABI boundary.
pub const CFAOI_ERR_ARGUMENT: i32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn code_of(e: &cfaoi::Error) -> i32 {
    match e.exit_code() {
        2 => CFAOI_ERR_CONFIG,
        4 => CFAOI_ERR_INFEASIBLE,
        _ => CFAOI_ERR_NUMERICAL,
    }
}

fn fail(e: &cfaoi::Error) -> i32 {
    set_error(&e.to_string());
    code_of(e)
}

/// Last error message for this thread, or null when no error occurred.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cfaoi_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Parse a JSON parameter document (UTF-8, `{value, unit}` pairs) into a
/// handle. Returns null on failure; see `cfaoi_last_error`.
///
/// # Safety
/// `json` must point to a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cfaoi_params_from_json(json: *const c_char) -> *mut CfaoiParams {
    if json.is_null() {
        set_error("null json pointer");
        return std::ptr::null_mut();
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("json is not valid UTF-8");
            return std::ptr::null_mut();
        }
    };
    match SystemParameters::from_json(text) {
        Ok(p) => Box::into_raw(Box::new(CfaoiParams { inner: p })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Release a parameter handle. Null is ignored.
///
/// # Safety
/// `p` must be a pointer returned by `cfaoi_params_from_json`, freed once.
#[no_mangle]
pub unsafe extern "C" fn cfaoi_params_free(p: *mut CfaoiParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn params_ref<'a>(p: *const CfaoiParams) -> Option<&'a SystemParameters> {
    p.as_ref().map(|h| &h.inner)
}

/// Network sensing coverage probability.
///
/// # Safety
/// `p` must be a live handle; `out` must point to writable memory.
#[no_mangle]
pub unsafe extern "C" fn cfaoi_sensing_coverage(p: *const CfaoiParams, out: *mut f64) -> i32 {
    let (Some(params), false) = (params_ref(p), out.is_null()) else {
        set_error("null argument");
        return CFAOI_ERR_ARGUMENT;
    };
    match sensing::sensing_coverage(params, &QuadratureSpec::default()) {
        Ok(c) => {
            *out = c.p_cov_s;
            CFAOI_OK
        }
        Err(e) => fail(&e),
    }
}

/// Closed-form communication coverage lower bound at threshold `gamma_th`
/// (linear). `saturated` reports the psi <= 0 degenerate case and may be null.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable; `saturated` writable or null.
#[no_mangle]
pub unsafe extern "C" fn cfaoi_comm_coverage(
    p: *const CfaoiParams,
    gamma_th: f64,
    out: *mut f64,
    saturated: *mut i32,
) -> i32 {
    let (Some(params), false) = (params_ref(p), out.is_null()) else {
        set_error("null argument");
        return CFAOI_ERR_ARGUMENT;
    };
    match comm::comm_coverage(gamma_th, params) {
        Ok(c) => {
            *out = c.p_cov_c;
            if !saturated.is_null() {
                *saturated = i32::from(c.saturated);
            }
            CFAOI_OK
        }
        Err(e) => fail(&e),
    }
}

/// Network-wide PAVP bound minimized over theta. `zeta` in seconds,
/// `gamma_th` linear. Outputs may individually be null.
///
/// # Safety
/// `p` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cfaoi_pavp_networkwide(
    p: *const CfaoiParams,
    zeta: f64,
    gamma_th: f64,
    out_upsilon_nw: *mut f64,
    out_theta_star: *mut f64,
    out_stable: *mut i32,
) -> i32 {
    let Some(params) = params_ref(p) else {
        set_error("null params");
        return CFAOI_ERR_ARGUMENT;
    };
    match snc::best_theta(zeta, params, gamma_th, &QuadratureSpec::default()) {
        Ok(r) => {
            if !out_upsilon_nw.is_null() {
                *out_upsilon_nw = r.upsilon_nw;
            }
            if !out_theta_star.is_null() {
                *out_theta_star = r.theta_star.unwrap_or(f64::NAN);
            }
            if !out_stable.is_null() {
                *out_stable = i32::from(r.stable);
            }
            CFAOI_OK
        }
        Err(e) => fail(&e),
    }
}

/// Partition-factor line search. Returns `CFAOI_ERR_INFEASIBLE` when no
/// stable theta exists anywhere on the beta grid.
///
/// # Safety
/// `p` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cfaoi_solve_partition(
    p: *const CfaoiParams,
    zeta: f64,
    gamma_th: f64,
    grid_points: usize,
    out_beta_star: *mut f64,
    out_upsilon_nw_star: *mut f64,
) -> i32 {
    let Some(params) = params_ref(p) else {
        set_error("null params");
        return CFAOI_ERR_ARGUMENT;
    };
    match optimizer::solve_partition(
        params,
        zeta,
        gamma_th,
        grid_points,
        &QuadratureSpec::default(),
    ) {
        Ok(sol) => {
            if !out_beta_star.is_null() {
                *out_beta_star = sol.beta_star;
            }
            if !out_upsilon_nw_star.is_null() {
                *out_upsilon_nw_star = sol.upsilon_nw_star;
            }
            if sol.feasible_interval.is_none() {
                set_error("entire beta grid is unstable");
                return CFAOI_ERR_INFEASIBLE;
            }
            CFAOI_OK
        }
        Err(e) => fail(&e),
    }
}

/// Empirical PAVP over `realizations` spatial realizations with `packets`
/// packets each, seeded deterministically.
///
/// # Safety
/// `p` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cfaoi_simulate_pavp(
    p: *const CfaoiParams,
    zeta: f64,
    gamma_th: f64,
    realizations: usize,
    packets: usize,
    seed: u64,
    out_mean: *mut f64,
    out_std_err: *mut f64,
) -> i32 {
    let Some(params) = params_ref(p) else {
        set_error("null params");
        return CFAOI_ERR_ARGUMENT;
    };
    match montecarlo::simulate_pavp(
        params,
        zeta,
        gamma_th,
        realizations,
        packets,
        seed,
        &McOptions::default(),
    ) {
        Ok(est) => {
            if !out_mean.is_null() {
                *out_mean = est.mean;
            }
            if !out_std_err.is_null() {
                *out_std_err = est.std_err;
            }
            CFAOI_OK
        }
        Err(e) => fail(&e),
    }
}
