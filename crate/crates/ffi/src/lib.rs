//! C ABI for the p-adic hard-core engine.
//!
//! Conventions:
//! - values cross the boundary as opaque handles (`PhcPadic`, `PhcParams`)
//!   or as NUL-terminated JSON/text strings allocated by this library;
//! - every function returns a `PhcStatus`; out-parameters are written only
//!   on `Ok` (solver entry points also write their report JSON on non-`Ok`
//!   statuses so callers can inspect gates);
//! - strings must be released with `phc_string_free`, handles with their
//!   matching `*_free`; panics are caught and reported as `Panic`.

use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use padic_hc::error::Error;
use padic_hc::model::{
    existence_gate, existence_table, periodic_gate, periodic_table, BoundaryField, ModelParams,
};
use padic_hc::oracle::{
    build_volume, check_compatibility, count_admissible_unbounded, mu_norm_exponent_range,
    norm_exponent_string, normalization_residual, omega_count_closed_form, padic_norm_of_count,
    OracleReport, Topology,
};
use padic_hc::padic::{PadicNumber, Valuation};
use padic_hc::report::ReportStatus;
use padic_hc::solve::{periodic_solve, ti_solve, ti_uniqueness_scan};

/// Status codes; the numeric values match the CLI exit-code contract.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhcStatus {
    Ok = 0,
    /// A gate/ball condition failed, existence is undecided, or no solution
    /// of the requested class exists.
    GateFailed = 2,
    NumericalFailure = 3,
    BadInput = 4,
    CapExceeded = 5,
    NullPointer = 6,
    Panic = 7,
}

/// Opaque handle: an element of Q_p at finite precision.
pub struct PhcPadic(PadicNumber);

/// Opaque handle: validated model parameters (p, k, J, lambda).
pub struct PhcParams(ModelParams);

fn status_of_error(e: &Error) -> PhcStatus {
    match e {
        Error::CapExceeded { .. } => PhcStatus::CapExceeded,
        Error::BadInput(_)
        | Error::InvalidPrime(_)
        | Error::NotPrime(_)
        | Error::ZeroDenominator
        | Error::InvalidOrder
        | Error::NotInEp
        | Error::CouplingOutsideDomain
        | Error::OrderTooLargeForTable(_)
        | Error::BoundaryNotInEp { .. }
        | Error::BoundaryLevelMissing { .. } => PhcStatus::BadInput,
        _ => PhcStatus::NumericalFailure,
    }
}

fn status_of_report(status: ReportStatus) -> PhcStatus {
    match status {
        ReportStatus::Solved => PhcStatus::Ok,
        ReportStatus::GateFailed
        | ReportStatus::Undecided
        | ReportStatus::NoRootInEp
        | ReportStatus::TiCoincident => PhcStatus::GateFailed,
        ReportStatus::NumericalFailure => PhcStatus::NumericalFailure,
    }
}

fn write_string(text: String, out: *mut *mut c_char) -> PhcStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => return PhcStatus::NumericalFailure,
    };
    unsafe { *out = c.into_raw() };
    PhcStatus::Ok
}

fn guarded(f: impl FnOnce() -> PhcStatus) -> PhcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => PhcStatus::Panic,
    }
}

/// Release a string allocated by this library.
///
/// # Safety
/// `s` must have been returned by a `phc_*` function and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn phc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build num/den as an element of Q_p with `precision` unit digits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_padic_from_rational(
    prime: u64,
    precision: u32,
    num: i64,
    den: i64,
    out: *mut *mut PhcPadic,
) -> PhcStatus {
    if out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(
        || match PadicNumber::from_rational(num, den, prime, precision) {
            Ok(x) => {
                *out = Box::into_raw(Box::new(PhcPadic(x)));
                PhcStatus::Ok
            }
            Err(e) => status_of_error(&e),
        },
    )
}

/// # Safety
/// `x` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn phc_padic_free(x: *mut PhcPadic) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Canonical rendering "p^v * (d0 + d1*p + ...) + O(p^m)".
///
/// # Safety
/// `x` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_padic_render(x: *const PhcPadic, out: *mut *mut c_char) -> PhcStatus {
    if x.is_null() || out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| write_string((*x).0.to_string(), out))
}

/// JSON form {prime, valuation, digits, precision}.
///
/// # Safety
/// `x` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_padic_to_json(x: *const PhcPadic, out: *mut *mut c_char) -> PhcStatus {
    if x.is_null() || out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| match serde_json::to_string(&(*x).0) {
        Ok(text) => write_string(text, out),
        Err(_) => PhcStatus::NumericalFailure,
    })
}

/// Valuation; `is_infinite` marks a value that is zero at precision.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn phc_padic_valuation(
    x: *const PhcPadic,
    valuation: *mut i64,
    is_infinite: *mut bool,
) -> PhcStatus {
    if x.is_null() || valuation.is_null() || is_infinite.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| {
        match (*x).0.valuation() {
            Valuation::Finite(v) => {
                *valuation = v;
                *is_infinite = false;
            }
            Valuation::Infinite => {
                *valuation = 0;
                *is_infinite = true;
            }
        }
        PhcStatus::Ok
    })
}

/// Parameters from the fugacity lambda = num/den (must lie in E_p).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_params_from_fugacity(
    p: u64,
    k: u32,
    num: i64,
    den: i64,
    precision: u32,
    out: *mut *mut PhcParams,
) -> PhcStatus {
    if out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| {
        let lam = match PadicNumber::from_rational(num, den, p, precision) {
            Ok(x) => x,
            Err(e) => return status_of_error(&e),
        };
        match ModelParams::from_fugacity(p, k, lam) {
            Ok(params) => {
                *out = Box::into_raw(Box::new(PhcParams(params)));
                PhcStatus::Ok
            }
            Err(e) => status_of_error(&e),
        }
    })
}

/// Parameters from the coupling J = num/den (|J|_p <= 1/p required);
/// lambda is computed as exp_p(J).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_params_from_coupling(
    p: u64,
    k: u32,
    num: i64,
    den: i64,
    precision: u32,
    out: *mut *mut PhcParams,
) -> PhcStatus {
    if out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| {
        let j = match PadicNumber::from_rational(num, den, p, precision) {
            Ok(x) => x,
            Err(e) => return status_of_error(&e),
        };
        match ModelParams::from_coupling(p, k, j) {
            Ok(params) => {
                *out = Box::into_raw(Box::new(PhcParams(params)));
                PhcStatus::Ok
            }
            Err(e) => status_of_error(&e),
        }
    })
}

/// # Safety
/// `params` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn phc_params_free(params: *mut PhcParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// # Safety
/// `holds` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_existence_gate(p: u64, k: u32, holds: *mut bool) -> PhcStatus {
    if holds.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| match existence_gate(p, k) {
        Ok(b) => {
            *holds = b;
            PhcStatus::Ok
        }
        Err(e) => status_of_error(&e),
    })
}

/// # Safety
/// `holds` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_periodic_gate(p: u64, k: u32, holds: *mut bool) -> PhcStatus {
    if holds.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| match periodic_gate(p, k) {
        Ok(b) => {
            *holds = b;
            PhcStatus::Ok
        }
        Err(e) => status_of_error(&e),
    })
}

unsafe fn table_json(
    table: padic_hc::error::Result<std::collections::BTreeMap<u32, Vec<u64>>>,
    out: *mut *mut c_char,
) -> PhcStatus {
    match table {
        Ok(t) => match serde_json::to_string_pretty(&t) {
            Ok(text) => write_string(text, out),
            Err(_) => PhcStatus::NumericalFailure,
        },
        Err(e) => status_of_error(&e),
    }
}

/// JSON table {k: [primes p <= pmax with p | 2^k - 1]}.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_existence_table_json(
    kmax: u32,
    pmax: u64,
    out: *mut *mut c_char,
) -> PhcStatus {
    if out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| table_json(existence_table(kmax, pmax), out))
}

/// JSON table for the period-2 gate (p | 2^k - 1 and p | k - 2).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_periodic_table_json(
    kmax: u32,
    pmax: u64,
    out: *mut *mut c_char,
) -> PhcStatus {
    if out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| table_json(periodic_table(kmax, pmax), out))
}

/// Run the TI solver; writes the full report JSON (also on gate failure) and
/// returns the report's status.
///
/// # Safety
/// `params` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_ti_solve_json(
    params: *const PhcParams,
    precision: u32,
    out: *mut *mut c_char,
) -> PhcStatus {
    if params.is_null() || out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| match ti_solve(&(*params).0, precision) {
        Ok(report) => {
            let status = status_of_report(report.status);
            match serde_json::to_string_pretty(&report) {
                Ok(text) => {
                    let ws = write_string(text, out);
                    if ws == PhcStatus::Ok {
                        status
                    } else {
                        ws
                    }
                }
                Err(_) => PhcStatus::NumericalFailure,
            }
        }
        Err(e) => status_of_error(&e),
    })
}

/// Run the period-2 solver (closed form at (k, p) = (2, 3), general route
/// otherwise); same report/status convention as `phc_ti_solve_json`.
///
/// # Safety
/// `params` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_periodic_solve_json(
    params: *const PhcParams,
    precision: u32,
    out: *mut *mut c_char,
) -> PhcStatus {
    if params.is_null() || out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| match periodic_solve(&(*params).0, precision) {
        Ok(report) => {
            let status = status_of_report(report.status);
            match serde_json::to_string_pretty(&report) {
                Ok(text) => {
                    let ws = write_string(text, out);
                    if ws == PhcStatus::Ok {
                        status
                    } else {
                        ws
                    }
                }
                Err(_) => PhcStatus::NumericalFailure,
            }
        }
        Err(e) => status_of_error(&e),
    })
}

/// Exhaustive residue scan of the constant boundary law in the E_p window,
/// as a JSON array of residues mod p^modulus_exponent.
///
/// # Safety
/// `params` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_uniqueness_scan_json(
    params: *const PhcParams,
    modulus_exponent: u32,
    out: *mut *mut c_char,
) -> PhcStatus {
    if params.is_null() || out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(
        || match ti_uniqueness_scan(&(*params).0, modulus_exponent) {
            Ok(roots) => match serde_json::to_string(&roots) {
                Ok(text) => write_string(text, out),
                Err(_) => PhcStatus::NumericalFailure,
            },
            Err(e) => status_of_error(&e),
        },
    )
}

/// Admissible-configuration counting report (full tree); `p` = 0 omits the
/// norm field. Exact DP count plus the closed form and their match flag.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_oracle_count_json(
    k: u32,
    n: u32,
    p: u64,
    out: *mut *mut c_char,
) -> PhcStatus {
    if out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| {
        let dp = match count_admissible_unbounded(k, n, Topology::FullCayley) {
            Ok(c) => c,
            Err(e) => return status_of_error(&e),
        };
        let closed = omega_count_closed_form(k, n).ok();
        let omega_norm = if p != 0 {
            match padic_norm_of_count(&dp, p) {
                Ok(nrm) => Some(nrm.to_string()),
                Err(e) => return status_of_error(&e),
            }
        } else {
            None
        };
        let report = OracleReport {
            k,
            n,
            topology: Topology::FullCayley,
            p: (p != 0).then_some(p),
            boundary: None,
            omega_count: Some(dp.to_string()),
            omega_count_closed_form: closed.as_ref().map(|c| c.to_string()),
            closed_form_match: closed.as_ref().map(|c| *c == dp),
            omega_norm,
            normalization_ok: None,
            min_deviation_valuation: None,
            mu_norm_range: None,
        };
        match serde_json::to_string_pretty(&report) {
            Ok(text) => write_string(text, out),
            Err(_) => PhcStatus::NumericalFailure,
        }
    })
}

unsafe fn ti_boundary_of(params: &ModelParams, precision: u32) -> Result<BoundaryField, Error> {
    let rep = ti_solve(params, precision)?;
    if rep.solutions.is_empty() {
        return Err(Error::BadInput(format!(
            "no TI boundary law (status {})",
            rep.status
        )));
    }
    BoundaryField::constant(rep.solutions[0].residues[0].clone())
}

/// Compatibility of the finite-volume measures across one level on the
/// k-branch, under the TI boundary law. Returns `Ok` iff compatible.
///
/// # Safety
/// `params` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_oracle_compat_json(
    params: *const PhcParams,
    n: u32,
    cap: usize,
    precision: u32,
    out: *mut *mut c_char,
) -> PhcStatus {
    if params.is_null() || out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| {
        let params = &(*params).0;
        let boundary = match ti_boundary_of(params, precision) {
            Ok(b) => b,
            Err(e) => return status_of_error(&e),
        };
        let rep = match check_compatibility(params, &boundary, n, cap) {
            Ok(r) => r,
            Err(e) => return status_of_error(&e),
        };
        let report = OracleReport {
            k: params.order(),
            n,
            topology: Topology::KBranch,
            p: Some(params.prime()),
            boundary: Some(boundary),
            omega_count: None,
            omega_count_closed_form: None,
            closed_form_match: None,
            omega_norm: None,
            normalization_ok: None,
            min_deviation_valuation: Some(rep.min_deviation),
            mu_norm_range: None,
        };
        let compatible = rep.compatible;
        match serde_json::to_string_pretty(&report) {
            Ok(text) => {
                let ws = write_string(text, out);
                if ws != PhcStatus::Ok {
                    return ws;
                }
                if compatible {
                    PhcStatus::Ok
                } else {
                    PhcStatus::NumericalFailure
                }
            }
            Err(_) => PhcStatus::NumericalFailure,
        }
    })
}

/// Measure-norm report on the full tree under the TI boundary law:
/// normalization, |mu| range, and the |Omega| norm.
///
/// # Safety
/// `params` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn phc_oracle_norms_json(
    params: *const PhcParams,
    n: u32,
    cap: usize,
    precision: u32,
    out: *mut *mut c_char,
) -> PhcStatus {
    if params.is_null() || out.is_null() {
        return PhcStatus::NullPointer;
    }
    guarded(|| {
        let params = &(*params).0;
        let boundary = match ti_boundary_of(params, precision) {
            Ok(b) => b,
            Err(e) => return status_of_error(&e),
        };
        let result = (|| -> Result<(OracleReport, bool), Error> {
            let vol = build_volume(params.order(), n, Topology::FullCayley, cap)?;
            let normalization = normalization_residual(&vol, params, &boundary)?;
            let normalization_ok = normalization.at_least(precision as i64 / 2);
            let (lo, hi) = mu_norm_exponent_range(&vol, params, &boundary)?;
            let count = padic_hc::oracle::count_admissible(&vol);
            let report = OracleReport {
                k: params.order(),
                n,
                topology: Topology::FullCayley,
                p: Some(params.prime()),
                boundary: Some(boundary),
                omega_count: Some(count.to_string()),
                omega_count_closed_form: None,
                closed_form_match: None,
                omega_norm: Some(padic_norm_of_count(&count, params.prime())?.to_string()),
                normalization_ok: Some(normalization_ok),
                min_deviation_valuation: None,
                mu_norm_range: Some([
                    norm_exponent_string(params.prime(), lo),
                    norm_exponent_string(params.prime(), hi),
                ]),
            };
            Ok((report, normalization_ok))
        })();
        match result {
            Ok((report, normalization_ok)) => match serde_json::to_string_pretty(&report) {
                Ok(text) => {
                    let ws = write_string(text, out);
                    if ws != PhcStatus::Ok {
                        return ws;
                    }
                    if normalization_ok {
                        PhcStatus::Ok
                    } else {
                        PhcStatus::NumericalFailure
                    }
                }
                Err(_) => PhcStatus::NumericalFailure,
            },
            Err(e) => status_of_error(&e),
        }
    })
}
