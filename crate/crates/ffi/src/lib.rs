//! C ABI for the cvqss library: opaque handles, status codes, and the
//! numerical entry points a host language needs. Share indices here are
//! 0-based; strings returned through `char **` belong to the caller and
//! must be released with `cvqss_string_free`.

use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cvqss::cost;
use cvqss::decoder::{self, DisentanglingPlan};
use cvqss::fidelity::{self, DegradationParams};
use cvqss::matlib::Tolerance;
use cvqss::scheme::{random_encoding, SchemeView, ThresholdParams};
use cvqss::Error;

/// Outcome of an FFI call. Zero is success; everything else names the
/// first failure encountered.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvqssStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    NonFinite = 3,
    DimensionMismatch = 4,
    InvalidParam = 5,
    RankDeficient = 6,
    NotOrthonormal = 7,
    Singular = 8,
    NoCloning = 9,
    BadIndex = 10,
    BadSubset = 11,
    TooManyDropped = 12,
    GenerationFailed = 13,
    InconsistentExpansion = 14,
    KappaUndefined = 15,
    Serialization = 16,
    InternalPanic = 17,
}

fn status_of(err: &Error) -> CvqssStatus {
    match err {
        Error::NonFinite { .. } => CvqssStatus::NonFinite,
        Error::DimensionMismatch { .. } => CvqssStatus::DimensionMismatch,
        Error::InvalidParam { .. } => CvqssStatus::InvalidParam,
        Error::RankDeficient { .. } => CvqssStatus::RankDeficient,
        Error::NotOrthonormal { .. } => CvqssStatus::NotOrthonormal,
        Error::Singular { .. } => CvqssStatus::Singular,
        Error::NoCloning { .. } => CvqssStatus::NoCloning,
        Error::BadIndex { .. } => CvqssStatus::BadIndex,
        Error::BadSubset { .. } => CvqssStatus::BadSubset,
        Error::TooManyDropped { .. } => CvqssStatus::TooManyDropped,
        Error::GenerationFailed { .. } => CvqssStatus::GenerationFailed,
        Error::InconsistentExpansion { .. } => CvqssStatus::InconsistentExpansion,
        Error::KappaUndefined => CvqssStatus::KappaUndefined,
    }
}

/// Generated scheme handle. Opaque to C.
pub struct CvqssScheme(SchemeView);

/// Factored disentangling plan handle. Opaque to C.
pub struct CvqssPlan(DisentanglingPlan);

/// Cost-minimization result as a plain C struct. `case_tag` is 1 when
/// both eigenvalues sit on one side of 1 at the optimum and 2 when they
/// straddle it.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CvqssCostMin {
    pub gamma0: c_double,
    pub r_min: c_double,
    pub lambda1: c_double,
    pub lambda2: c_double,
    pub case_tag: c_int,
}

fn guarded<F: FnOnce() -> CvqssStatus>(f: F) -> CvqssStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => CvqssStatus::InternalPanic,
    }
}

/// Reads a caller-supplied 0-based index list.
unsafe fn subset_slice<'a>(ptr: *const usize, len: usize) -> Option<&'a [usize]> {
    if ptr.is_null() {
        return None;
    }
    Some(std::slice::from_raw_parts(ptr, len))
}

fn string_out(s: String, out: *mut *mut c_char) -> CvqssStatus {
    match CString::new(s) {
        Ok(cs) => {
            unsafe { *out = cs.into_raw() };
            CvqssStatus::Ok
        }
        Err(_) => CvqssStatus::Serialization,
    }
}

/// Generates a random (k, n) scheme.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle that
/// must be released with `cvqss_scheme_free`.
#[no_mangle]
pub unsafe extern "C" fn cvqss_scheme_generate(
    k: usize,
    n: usize,
    seed: u64,
    out: *mut *mut CvqssScheme,
) -> CvqssStatus {
    if out.is_null() {
        return CvqssStatus::NullPointer;
    }
    guarded(|| {
        let params = match ThresholdParams::new(k, n) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        match random_encoding(params, seed) {
            Ok(view) => {
                *out = Box::into_raw(Box::new(CvqssScheme(view)));
                CvqssStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Parses a scheme document produced by `cvqss_scheme_to_json` or the
/// CLI scheme command.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer; on
/// success `out` receives a handle to free with `cvqss_scheme_free`.
#[no_mangle]
pub unsafe extern "C" fn cvqss_scheme_from_json(
    json: *const c_char,
    out: *mut *mut CvqssScheme,
) -> CvqssStatus {
    if json.is_null() || out.is_null() {
        return CvqssStatus::NullPointer;
    }
    guarded(|| {
        let raw = match CStr::from_ptr(json).to_str() {
            Ok(s) => s,
            Err(_) => return CvqssStatus::InvalidUtf8,
        };
        match SchemeView::from_json(raw) {
            Ok(view) => {
                *out = Box::into_raw(Box::new(CvqssScheme(view)));
                CvqssStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Serializes a scheme to its JSON document form.
///
/// # Safety
/// `scheme` must come from this library and `out` must be valid; the
/// returned string must be released with `cvqss_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cvqss_scheme_to_json(
    scheme: *const CvqssScheme,
    out: *mut *mut c_char,
) -> CvqssStatus {
    if scheme.is_null() || out.is_null() {
        return CvqssStatus::NullPointer;
    }
    guarded(|| match (*scheme).0.to_json() {
        Ok(s) => string_out(s, out),
        Err(e) => status_of(&e),
    })
}

/// Threshold k of the scheme, or 0 when `scheme` is NULL.
///
/// # Safety
/// `scheme` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_scheme_k(scheme: *const CvqssScheme) -> usize {
    if scheme.is_null() {
        return 0;
    }
    (*scheme).0.k()
}

/// Number of available shares, or 0 when `scheme` is NULL.
///
/// # Safety
/// `scheme` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_scheme_n(scheme: *const CvqssScheme) -> usize {
    if scheme.is_null() {
        return 0;
    }
    (*scheme).0.n_available()
}

/// Releases a scheme handle. NULL is a no-op.
///
/// # Safety
/// `scheme` must be NULL or an unreleased handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_scheme_free(scheme: *mut CvqssScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Builds the two-squeezer disentangling plan for a collaborating
/// subset. `subset` lists 0-based share indices, `subset_len` of them.
/// `gamma` may be NULL to use the squeezing-optimal free parameter.
///
/// # Safety
/// `scheme` must be a live handle, `subset` must point to `subset_len`
/// indices, `gamma` must be NULL or valid, and `out` must be valid; on
/// success `out` receives a handle to free with `cvqss_plan_free`.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_build(
    scheme: *const CvqssScheme,
    subset: *const usize,
    subset_len: usize,
    gamma: *const c_double,
    out: *mut *mut CvqssPlan,
) -> CvqssStatus {
    if scheme.is_null() || out.is_null() {
        return CvqssStatus::NullPointer;
    }
    let collaborators = match subset_slice(subset, subset_len) {
        Some(s) => s,
        None => return CvqssStatus::NullPointer,
    };
    let gamma = if gamma.is_null() { None } else { Some(*gamma) };
    guarded(|| {
        match decoder::plan_for(&(*scheme).0, collaborators, gamma, Tolerance::default()) {
            Ok((plan, _)) => {
                *out = Box::into_raw(Box::new(CvqssPlan(plan)));
                CvqssStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

unsafe fn plan_field(plan: *const CvqssPlan, get: impl Fn(&DisentanglingPlan) -> f64) -> c_double {
    if plan.is_null() {
        return f64::NAN;
    }
    get(&(*plan).0)
}

/// First squeezing exponent, or NaN when `plan` is NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_r1(plan: *const CvqssPlan) -> c_double {
    plan_field(plan, DisentanglingPlan::r1)
}

/// Second squeezing exponent, or NaN when `plan` is NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_r2(plan: *const CvqssPlan) -> c_double {
    plan_field(plan, DisentanglingPlan::r2)
}

/// Secret coefficient of the expanded transform, or NaN when NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_alpha(plan: *const CvqssPlan) -> c_double {
    plan_field(plan, DisentanglingPlan::alpha)
}

/// First-row noise coefficient, or NaN when NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_beta(plan: *const CvqssPlan) -> c_double {
    plan_field(plan, DisentanglingPlan::beta)
}

/// Free parameter the plan was built with, or NaN when NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_gamma(plan: *const CvqssPlan) -> c_double {
    plan_field(plan, DisentanglingPlan::gamma_free)
}

/// Total squeezing |r1| + |r2| in nats, or NaN when NULL.
///
/// # Safety
/// `plan` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_total_squeezing(plan: *const CvqssPlan) -> c_double {
    plan_field(plan, DisentanglingPlan::total_squeezing)
}

/// Serializes a plan to its JSON document form.
///
/// # Safety
/// `plan` must be a live handle and `out` valid; the returned string
/// must be released with `cvqss_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_to_json(
    plan: *const CvqssPlan,
    out: *mut *mut c_char,
) -> CvqssStatus {
    if plan.is_null() || out.is_null() {
        return CvqssStatus::NullPointer;
    }
    guarded(|| match (*plan).0.to_json() {
        Ok(s) => string_out(s, out),
        Err(e) => status_of(&e),
    })
}

/// Releases a plan handle. NULL is a no-op.
///
/// # Safety
/// `plan` must be NULL or an unreleased handle from this library.
#[no_mangle]
pub unsafe extern "C" fn cvqss_plan_free(plan: *mut CvqssPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Minimizes total squeezing over the free parameter. `use_oracle`
/// false takes the closed-form route, true the grid-plus-golden-section
/// numerical route.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cvqss_cost_minimize(
    alpha: c_double,
    beta: c_double,
    use_oracle: bool,
    out: *mut CvqssCostMin,
) -> CvqssStatus {
    if out.is_null() {
        return CvqssStatus::NullPointer;
    }
    guarded(|| {
        let result = if use_oracle {
            cost::minimize_gamma_oracle(alpha, beta)
        } else {
            cost::minimize_gamma_analytic(alpha, beta)
        };
        match result {
            Ok(r) => {
                *out = CvqssCostMin {
                    gamma0: r.gamma0,
                    r_min: r.r_min,
                    lambda1: r.lambda1,
                    lambda2: r.lambda2,
                    case_tag: match r.case_tag {
                        cost::CaseTag::ProductCaseI => 1,
                        cost::CaseTag::RatioCaseII => 2,
                    },
                };
                CvqssStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Total squeezing |ln lambda1| + |ln lambda2| at a given free
/// parameter.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cvqss_total_squeezing(
    alpha: c_double,
    beta: c_double,
    gamma: c_double,
    out: *mut c_double,
) -> CvqssStatus {
    if out.is_null() {
        return CvqssStatus::NullPointer;
    }
    guarded(|| match cost::total_squeezing(alpha, beta, gamma) {
        Ok(r) => {
            *out = r;
            CvqssStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Replica fidelity from noise weights (u, v) at ancilla width a.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cvqss_analytic_fidelity(
    u: c_double,
    v: c_double,
    a: c_double,
    out: *mut c_double,
) -> CvqssStatus {
    if out.is_null() {
        return CvqssStatus::NullPointer;
    }
    guarded(|| match DegradationParams::new(u, v, a) {
        Ok(p) => {
            *out = fidelity::analytic_fidelity(&p);
            CvqssStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Runs the full pipeline for a collaborating subset at ancilla width a
/// and secret mean (mean_x, mean_p), writing the simulated and the
/// closed-form fidelity. `gamma` may be NULL for the optimal choice.
///
/// # Safety
/// `scheme` must be a live handle, `subset` must point to `subset_len`
/// indices, `gamma` must be NULL or valid, and both out pointers must
/// be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn cvqss_end_to_end_fidelity(
    scheme: *const CvqssScheme,
    subset: *const usize,
    subset_len: usize,
    a: c_double,
    gamma: *const c_double,
    mean_x: c_double,
    mean_p: c_double,
    out_simulated: *mut c_double,
    out_analytic: *mut c_double,
) -> CvqssStatus {
    if scheme.is_null() || out_simulated.is_null() || out_analytic.is_null() {
        return CvqssStatus::NullPointer;
    }
    let collaborators = match subset_slice(subset, subset_len) {
        Some(s) => s,
        None => return CvqssStatus::NullPointer,
    };
    let gamma = if gamma.is_null() { None } else { Some(*gamma) };
    guarded(|| {
        match fidelity::end_to_end_fidelity(
            &(*scheme).0,
            collaborators,
            a,
            gamma,
            (mean_x, mean_p),
            Tolerance::default(),
        ) {
            Ok((sim, analytic)) => {
                *out_simulated = sim;
                *out_analytic = analytic;
                CvqssStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Distinguishability of two secrets from a (k-1)-member coalition's
/// marginal, in [0, 1].
///
/// # Safety
/// `scheme` must be a live handle, `coalition` must point to
/// `coalition_len` indices, and `out` must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn cvqss_adversary_leakage(
    scheme: *const CvqssScheme,
    coalition: *const usize,
    coalition_len: usize,
    a: c_double,
    first_x: c_double,
    first_p: c_double,
    second_x: c_double,
    second_p: c_double,
    out: *mut c_double,
) -> CvqssStatus {
    if scheme.is_null() || out.is_null() {
        return CvqssStatus::NullPointer;
    }
    let members = match subset_slice(coalition, coalition_len) {
        Some(s) => s,
        None => return CvqssStatus::NullPointer,
    };
    guarded(|| {
        match fidelity::adversary_leakage(
            &(*scheme).0,
            members,
            a,
            ((first_x, first_p), (second_x, second_p)),
        ) {
            Ok(leak) => {
                *out = leak;
                CvqssStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string obtained from this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn cvqss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static name for a status code; never NULL.
#[no_mangle]
pub extern "C" fn cvqss_status_name(status: CvqssStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        CvqssStatus::Ok => b"ok\0",
        CvqssStatus::NullPointer => b"null pointer\0",
        CvqssStatus::InvalidUtf8 => b"invalid utf-8\0",
        CvqssStatus::NonFinite => b"non-finite value\0",
        CvqssStatus::DimensionMismatch => b"dimension mismatch\0",
        CvqssStatus::InvalidParam => b"invalid parameter\0",
        CvqssStatus::RankDeficient => b"rank deficient\0",
        CvqssStatus::NotOrthonormal => b"not orthonormal\0",
        CvqssStatus::Singular => b"singular matrix\0",
        CvqssStatus::NoCloning => b"no-cloning bound violated\0",
        CvqssStatus::BadIndex => b"index out of range\0",
        CvqssStatus::BadSubset => b"bad subset\0",
        CvqssStatus::TooManyDropped => b"too many dropped shares\0",
        CvqssStatus::GenerationFailed => b"generation failed\0",
        CvqssStatus::InconsistentExpansion => b"inconsistent expansion\0",
        CvqssStatus::KappaUndefined => b"kappa undefined\0",
        CvqssStatus::Serialization => b"serialization failed\0",
        CvqssStatus::InternalPanic => b"internal panic\0",
    };
    name.as_ptr() as *const c_char
}
