//! C ABI over the chartax library.
//!
//! Conventions (see `include/chartax.h` for the full surface):
//!
//! - Objects are opaque handles created by `*_new` and released by the
//!   matching `*_free`. A handle is never shared between create/free
//!   pairs of different types.
//! - Every fallible call returns a `chartax_status` code; `CHARTAX_OK`
//!   is 0. On failure, `chartax_last_error_message()` returns a
//!   thread-local, NUL-terminated description valid until the next
//!   failing call on the same thread.
//! - Rich results (dichotomy verdicts, taxonomy reports) are returned as
//!   JSON documents allocated by the library; release them with
//!   `chartax_string_free`.
//! - Characters are addressed by their enumeration id `0 <= id < phi(D)`
//!   (id 0 is the principal character), so no character handle is needed.
//!
//! All functions catch panics at the boundary and convert them to
//! `CHARTAX_ERR_PANIC`; nothing unwinds across the ABI.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use chartax::characters::GroupStructure;
use chartax::dichotomy::{extremal_example, fejer, nearest_integer_distance, theorem1_check};
use chartax::distance::char_delta;
use chartax::multiplicative::SupportSet;
use chartax::sieve::smooth_progression_count;
use chartax::taxonomy::{taxonomy_report, TaxonomyParams};
use chartax::{Error, PrimeTable};

pub const CHARTAX_OK: c_int = 0;
pub const CHARTAX_ERR_INVALID_ARGUMENT: c_int = 1;
pub const CHARTAX_ERR_RESOURCE: c_int = 2;
pub const CHARTAX_ERR_NULL_POINTER: c_int = 3;
pub const CHARTAX_ERR_PANIC: c_int = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> c_int {
    match err {
        Error::InvalidArgument(_) => CHARTAX_ERR_INVALID_ARGUMENT,
        Error::Resource(_) => CHARTAX_ERR_RESOURCE,
    }
}

/// Run a fallible body behind the panic guard, storing the error text.
fn guarded(f: impl FnOnce() -> Result<(), (c_int, String)>) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CHARTAX_OK,
        Ok(Err((code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("panic inside chartax");
            CHARTAX_ERR_PANIC
        }
    }
}

fn lib_err(e: Error) -> (c_int, String) {
    (status_of(&e), e.to_string())
}

fn null_err(what: &str) -> (c_int, String) {
    (CHARTAX_ERR_NULL_POINTER, format!("null pointer: {what}"))
}

/// Last error message for this thread (empty string when none).
///
/// # Safety
/// The pointer is valid until the next failing chartax call on the same
/// thread; do not free it.
#[no_mangle]
pub unsafe extern "C" fn chartax_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Opaque prime table.
pub struct ChartaxPrimeTable(Arc<PrimeTable>);
/// Opaque character group.
pub struct ChartaxGroup(Arc<GroupStructure>);

// ---------------------------------------------------------------- primes

/// Build a prime/spf table up to `limit`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that
/// must be released with `chartax_prime_table_free`.
#[no_mangle]
pub unsafe extern "C" fn chartax_prime_table_new(
    limit: u64,
    out: *mut *mut ChartaxPrimeTable,
) -> c_int {
    guarded(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let table = PrimeTable::build(limit).map_err(lib_err)?;
        unsafe { *out = Box::into_raw(Box::new(ChartaxPrimeTable(Arc::new(table)))) };
        Ok(())
    })
}

/// # Safety
/// `table` must come from `chartax_prime_table_new` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn chartax_prime_table_free(table: *mut ChartaxPrimeTable) {
    if !table.is_null() {
        drop(unsafe { Box::from_raw(table) });
    }
}

/// # Safety
/// `table` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_prime_count(
    table: *const ChartaxPrimeTable,
    out: *mut u64,
) -> c_int {
    guarded(|| {
        if table.is_null() || out.is_null() {
            return Err(null_err("table/out"));
        }
        unsafe { *out = (*table).0.prime_count() as u64 };
        Ok(())
    })
}

/// `L = sum_{d < p <= x} 1/p`.
///
/// # Safety
/// `table` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_reciprocal_sum(
    table: *const ChartaxPrimeTable,
    d: u64,
    x: u64,
    out: *mut c_double,
) -> c_int {
    guarded(|| {
        if table.is_null() || out.is_null() {
            return Err(null_err("table/out"));
        }
        let v = unsafe { &(*table).0 }
            .reciprocal_sum(d, x)
            .map_err(lib_err)?;
        unsafe { *out = v };
        Ok(())
    })
}

// ---------------------------------------------------------------- groups

/// Build the character group mod `d`.
///
/// # Safety
/// `out` must be valid; release the handle with `chartax_group_free`.
#[no_mangle]
pub unsafe extern "C" fn chartax_group_new(d: u64, out: *mut *mut ChartaxGroup) -> c_int {
    guarded(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let g = GroupStructure::build(d).map_err(lib_err)?;
        unsafe { *out = Box::into_raw(Box::new(ChartaxGroup(g))) };
        Ok(())
    })
}

/// # Safety
/// `group` must come from `chartax_group_new` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn chartax_group_free(group: *mut ChartaxGroup) {
    if !group.is_null() {
        drop(unsafe { Box::from_raw(group) });
    }
}

/// # Safety
/// `group` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_group_phi(group: *const ChartaxGroup, out: *mut u64) -> c_int {
    guarded(|| {
        if group.is_null() || out.is_null() {
            return Err(null_err("group/out"));
        }
        unsafe { *out = (*group).0.phi() };
        Ok(())
    })
}

/// Order of the character with enumeration id `chi_id`.
///
/// # Safety
/// `group` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_char_order(
    group: *const ChartaxGroup,
    chi_id: u64,
    out: *mut u64,
) -> c_int {
    guarded(|| {
        if group.is_null() || out.is_null() {
            return Err(null_err("group/out"));
        }
        let chi = unsafe { &(*group).0 }
            .character_by_id(chi_id)
            .map_err(lib_err)?;
        unsafe { *out = chi.order() };
        Ok(())
    })
}

/// chi(n), split into real and imaginary parts.
///
/// # Safety
/// `group`, `out_re`, `out_im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_char_eval(
    group: *const ChartaxGroup,
    chi_id: u64,
    n: u64,
    out_re: *mut c_double,
    out_im: *mut c_double,
) -> c_int {
    guarded(|| {
        if group.is_null() || out_re.is_null() || out_im.is_null() {
            return Err(null_err("group/out"));
        }
        let chi = unsafe { &(*group).0 }
            .character_by_id(chi_id)
            .map_err(lib_err)?;
        let v = chi.eval(n);
        unsafe {
            *out_re = v.re;
            *out_im = v.im;
        }
        Ok(())
    })
}

// -------------------------------------------------------------- kernels

/// Fejér kernel value; `n >= 1`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_fejer(n: u64, theta: c_double, out: *mut c_double) -> c_int {
    guarded(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        if n < 1 {
            return Err((
                CHARTAX_ERR_INVALID_ARGUMENT,
                "fejer kernel needs N >= 1".into(),
            ));
        }
        unsafe { *out = fejer(n, theta) };
        Ok(())
    })
}

/// Distance of `theta` to the nearest integer (pure, infallible).
#[no_mangle]
pub extern "C" fn chartax_nearest_integer_distance(theta: c_double) -> c_double {
    nearest_integer_distance(theta)
}

// ------------------------------------------------------------- distance

/// `sum_{d < p <= x} |1 - chi(p) p^{it}|^2 / p` over the full prime
/// window, with `delta_star = raw / L` (NaN when the window is empty).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_char_delta_full_window(
    table: *const ChartaxPrimeTable,
    group: *const ChartaxGroup,
    chi_id: u64,
    t: c_double,
    d: u64,
    x: u64,
    out_raw: *mut c_double,
    out_delta_star: *mut c_double,
) -> c_int {
    guarded(|| {
        if table.is_null() || group.is_null() || out_raw.is_null() || out_delta_star.is_null() {
            return Err(null_err("table/group/out"));
        }
        let table = unsafe { &(*table).0 };
        let chi = unsafe { &(*group).0 }
            .character_by_id(chi_id)
            .map_err(lib_err)?;
        let support = SupportSet::full_window(table, d, x).map_err(lib_err)?;
        let prof = char_delta(&support, &chi, t, table, d, x).map_err(lib_err)?;
        unsafe {
            *out_raw = prof.raw;
            *out_delta_star = prof.delta_star.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}

// ----------------------------------------------------------- dichotomy

/// Support selector for `chartax_theorem1_check_json`.
pub const CHARTAX_SUPPORT_FULL: c_int = 0;
pub const CHARTAX_SUPPORT_RPOWER: c_int = 1;

/// Run the dichotomy check and return the verdict as JSON (release with
/// `chartax_string_free`). `support_mode` is `CHARTAX_SUPPORT_FULL` (the
/// whole window; `support_param` ignored) or `CHARTAX_SUPPORT_RPOWER`
/// (primes that are r-th power residues, `support_param = r`, prime `d`).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_theorem1_check_json(
    table: *const ChartaxPrimeTable,
    group: *const ChartaxGroup,
    chi_id: u64,
    t: c_double,
    b_param: c_double,
    d: u64,
    x: u64,
    support_mode: c_int,
    support_param: u64,
    out_json: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        if table.is_null() || group.is_null() || out_json.is_null() {
            return Err(null_err("table/group/out_json"));
        }
        let table = unsafe { &(*table).0 };
        let chi = unsafe { &(*group).0 }
            .character_by_id(chi_id)
            .map_err(lib_err)?;
        let support = match support_mode {
            CHARTAX_SUPPORT_FULL => SupportSet::full_window(table, d, x).map_err(lib_err)?,
            CHARTAX_SUPPORT_RPOWER => {
                extremal_example(d, support_param, x, table)
                    .map_err(lib_err)?
                    .0
            }
            _ => {
                return Err((
                    CHARTAX_ERR_INVALID_ARGUMENT,
                    format!("unknown support mode {support_mode}"),
                ))
            }
        };
        let verdict = theorem1_check(&support, &chi, t, b_param, table, d, x).map_err(lib_err)?;
        let json = serde_json::to_string_pretty(&verdict)
            .map_err(|e| (CHARTAX_ERR_INVALID_ARGUMENT, e.to_string()))?;
        let c = CString::new(json).map_err(|e| (CHARTAX_ERR_INVALID_ARGUMENT, e.to_string()))?;
        unsafe { *out_json = c.into_raw() };
        Ok(())
    })
}

// ------------------------------------------------------------- taxonomy

/// Builtin g selector for `chartax_taxonomy_report_json`.
pub const CHARTAX_G_MOEBIUS: c_int = 0;
pub const CHARTAX_G_LIOUVILLE: c_int = 1;
pub const CHARTAX_G_UNIT: c_int = 2;
pub const CHARTAX_G_RANDOM: c_int = 3;

/// Full taxonomy report for one instance, as JSON (release with
/// `chartax_string_free`). `seed`/`density` are used only for
/// `CHARTAX_G_RANDOM`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_taxonomy_report_json(
    table: *const ChartaxPrimeTable,
    g_kind: c_int,
    seed: u64,
    density: c_double,
    d: u64,
    a: u64,
    x: u64,
    eps: c_double,
    b_param: c_double,
    out_json: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        if table.is_null() || out_json.is_null() {
            return Err(null_err("table/out_json"));
        }
        let table = unsafe { &(*table).0 };
        use chartax::multiplicative::{Builtin, MultiplicativeFunction};
        let builtin = match g_kind {
            CHARTAX_G_MOEBIUS => Builtin::Moebius,
            CHARTAX_G_LIOUVILLE => Builtin::Liouville,
            CHARTAX_G_UNIT => Builtin::Unit,
            CHARTAX_G_RANDOM => Builtin::UnimodularRandom { seed, density },
            _ => {
                return Err((
                    CHARTAX_ERR_INVALID_ARGUMENT,
                    format!("unknown g kind {g_kind}"),
                ))
            }
        };
        let g =
            MultiplicativeFunction::make_builtin(builtin, table, Some((d, x))).map_err(lib_err)?;
        let params = TaxonomyParams {
            eps,
            b_param,
            ..TaxonomyParams::default()
        };
        let rep = taxonomy_report(&g, d, a, x, &params, table).map_err(lib_err)?;
        let json = serde_json::to_string_pretty(&rep)
            .map_err(|e| (CHARTAX_ERR_INVALID_ARGUMENT, e.to_string()))?;
        let c = CString::new(json).map_err(|e| (CHARTAX_ERR_INVALID_ARGUMENT, e.to_string()))?;
        unsafe { *out_json = c.into_raw() };
        Ok(())
    })
}

// --------------------------------------------------------------- smooth

/// Count of `d^c`-smooth integers in `(sqrt(x), x]` congruent to `a`,
/// with the `x/d (log d/log x)^k` bound shape and the ratio.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn chartax_smooth_count(
    table: *const ChartaxPrimeTable,
    x: u64,
    d: u64,
    c: c_double,
    a: u64,
    k: u32,
    out_count: *mut u64,
    out_bound: *mut c_double,
    out_ratio: *mut c_double,
) -> c_int {
    guarded(|| {
        if table.is_null() || out_count.is_null() || out_bound.is_null() || out_ratio.is_null() {
            return Err(null_err("table/out"));
        }
        let table = unsafe { &(*table).0 };
        let rep = smooth_progression_count(x, d, c, a, k, table).map_err(lib_err)?;
        unsafe {
            *out_count = rep.count;
            *out_bound = rep.bound_shape;
            *out_ratio = rep.ratio;
        }
        Ok(())
    })
}

// -------------------------------------------------------------- strings

/// Release a string returned by a `_json` function.
///
/// # Safety
/// `s` must come from a chartax `_json` call and not be used again.
#[no_mangle]
pub unsafe extern "C" fn chartax_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
