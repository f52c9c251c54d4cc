//! Exercises the C ABI from Rust: handle lifecycles, status codes, and
//! numerical agreement with the published pins.

use std::ffi::{CStr, CString};
use std::ptr;

use cvqss_ffi::*;

fn make_scheme(k: usize, n: usize, seed: u64) -> *mut CvqssScheme {
    let mut scheme: *mut CvqssScheme = ptr::null_mut();
    let status = unsafe { cvqss_scheme_generate(k, n, seed, &mut scheme) };
    assert_eq!(status, CvqssStatus::Ok);
    assert!(!scheme.is_null());
    scheme
}

#[test]
fn scheme_generate_and_json_roundtrip() {
    let scheme = make_scheme(2, 3, 42);
    unsafe {
        assert_eq!(cvqss_scheme_k(scheme), 2);
        assert_eq!(cvqss_scheme_n(scheme), 3);

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(cvqss_scheme_to_json(scheme, &mut json), CvqssStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        assert!(text.contains("\"rows\""));

        let c_text = CString::new(text.clone()).unwrap();
        let mut reparsed: *mut CvqssScheme = ptr::null_mut();
        assert_eq!(cvqss_scheme_from_json(c_text.as_ptr(), &mut reparsed), CvqssStatus::Ok);
        assert_eq!(cvqss_scheme_k(reparsed), 2);

        let mut json2: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(cvqss_scheme_to_json(reparsed, &mut json2), CvqssStatus::Ok);
        assert_eq!(CStr::from_ptr(json2).to_str().unwrap(), text);

        cvqss_string_free(json);
        cvqss_string_free(json2);
        cvqss_scheme_free(reparsed);
        cvqss_scheme_free(scheme);
    }
}

#[test]
fn scheme_generate_rejects_cloning_range() {
    let mut scheme: *mut CvqssScheme = ptr::null_mut();
    let status = unsafe { cvqss_scheme_generate(2, 4, 1, &mut scheme) };
    assert_eq!(status, CvqssStatus::NoCloning);
    assert!(scheme.is_null());
}

#[test]
fn scheme_from_json_rejects_garbage() {
    let garbage = CString::new("not json").unwrap();
    let mut scheme: *mut CvqssScheme = ptr::null_mut();
    let status = unsafe { cvqss_scheme_from_json(garbage.as_ptr(), &mut scheme) };
    assert_eq!(status, CvqssStatus::InvalidParam);
    assert!(scheme.is_null());
}

#[test]
fn plan_build_reports_factorization() {
    let scheme = make_scheme(2, 3, 42);
    let subset = [0usize, 1usize];
    unsafe {
        let mut plan: *mut CvqssPlan = ptr::null_mut();
        let status = cvqss_plan_build(scheme, subset.as_ptr(), 2, ptr::null(), &mut plan);
        assert_eq!(status, CvqssStatus::Ok);

        let r1 = cvqss_plan_r1(plan);
        let r2 = cvqss_plan_r2(plan);
        let total = cvqss_plan_total_squeezing(plan);
        assert!(r1.is_finite() && r2.is_finite());
        assert!((r1.abs() + r2.abs() - total).abs() < 1e-12);
        assert!(cvqss_plan_alpha(plan).is_finite());
        assert!(cvqss_plan_beta(plan).is_finite());
        assert!(cvqss_plan_gamma(plan) > 0.0);

        let mut json: *mut std::ffi::c_char = ptr::null_mut();
        assert_eq!(cvqss_plan_to_json(plan, &mut json), CvqssStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap();
        assert!(text.contains("\"T\"") && text.contains("\"Z\""));
        cvqss_string_free(json);
        cvqss_plan_free(plan);

        // explicit free parameter is honored
        let gamma = 2.5f64;
        let mut forced: *mut CvqssPlan = ptr::null_mut();
        let status = cvqss_plan_build(scheme, subset.as_ptr(), 2, &gamma, &mut forced);
        assert_eq!(status, CvqssStatus::Ok);
        assert_eq!(cvqss_plan_gamma(forced), 2.5);
        cvqss_plan_free(forced);

        cvqss_scheme_free(scheme);
    }
}

#[test]
fn plan_build_rejects_bad_subsets() {
    let scheme = make_scheme(2, 3, 42);
    unsafe {
        let short = [0usize];
        let mut plan: *mut CvqssPlan = ptr::null_mut();
        assert_eq!(
            cvqss_plan_build(scheme, short.as_ptr(), 1, ptr::null(), &mut plan),
            CvqssStatus::BadSubset
        );
        let duplicate = [1usize, 1usize];
        assert_eq!(
            cvqss_plan_build(scheme, duplicate.as_ptr(), 2, ptr::null(), &mut plan),
            CvqssStatus::BadSubset
        );
        let out_of_range = [0usize, 9usize];
        let status = cvqss_plan_build(scheme, out_of_range.as_ptr(), 2, ptr::null(), &mut plan);
        assert!(status == CvqssStatus::BadIndex || status == CvqssStatus::BadSubset);
        assert!(plan.is_null());
        cvqss_scheme_free(scheme);
    }
}

#[test]
fn cost_minimize_matches_known_optimum() {
    let mut analytic = CvqssCostMin {
        gamma0: 0.0,
        r_min: 0.0,
        lambda1: 0.0,
        lambda2: 0.0,
        case_tag: 0,
    };
    let mut oracle = analytic;
    unsafe {
        assert_eq!(cvqss_cost_minimize(0.6, 0.8, false, &mut analytic), CvqssStatus::Ok);
        assert_eq!(cvqss_cost_minimize(0.6, 0.8, true, &mut oracle), CvqssStatus::Ok);
    }
    assert_eq!(analytic.gamma0, 1.0);
    assert!((analytic.r_min - 3.0f64.ln()).abs() < 1e-12);
    assert_eq!(analytic.case_tag, 2);
    assert!((analytic.r_min - oracle.r_min).abs() < 1e-6);

    let status = unsafe { cvqss_cost_minimize(0.0, 1.0, false, &mut analytic) };
    assert_eq!(status, CvqssStatus::InvalidParam);
}

#[test]
fn total_squeezing_evaluates_the_cost() {
    let mut r = f64::NAN;
    unsafe {
        assert_eq!(cvqss_total_squeezing(0.6, 0.8, 1.0, &mut r), CvqssStatus::Ok);
    }
    assert!((r - 3.0f64.ln()).abs() < 1e-12);
    let mut worse = f64::NAN;
    unsafe {
        assert_eq!(cvqss_total_squeezing(0.6, 0.8, 2.0, &mut worse), CvqssStatus::Ok);
    }
    assert!(worse > r);
}

#[test]
fn analytic_fidelity_hits_pins() {
    let mut f = f64::NAN;
    unsafe {
        assert_eq!(cvqss_analytic_fidelity(0.5, 1.0, 1.0, &mut f), CvqssStatus::Ok);
    }
    assert!((f - 1.6875f64.powf(-0.5)).abs() < 1e-15);
    unsafe {
        assert_eq!(cvqss_analytic_fidelity(0.0, 0.0, 5.0, &mut f), CvqssStatus::Ok);
    }
    assert_eq!(f, 1.0);
    let status = unsafe { cvqss_analytic_fidelity(-1.0, 0.0, 1.0, &mut f) };
    assert_eq!(status, CvqssStatus::InvalidParam);
}

#[test]
fn end_to_end_fidelity_agrees_with_closed_form() {
    let scheme = make_scheme(2, 3, 42);
    let subset = [0usize, 2usize];
    let mut sim = f64::NAN;
    let mut analytic = f64::NAN;
    let status = unsafe {
        cvqss_end_to_end_fidelity(
            scheme,
            subset.as_ptr(),
            2,
            2.0,
            ptr::null(),
            0.3,
            -0.2,
            &mut sim,
            &mut analytic,
        )
    };
    assert_eq!(status, CvqssStatus::Ok);
    assert!((sim - analytic).abs() < 1e-9, "sim {sim} vs analytic {analytic}");
    assert!(sim > 0.0 && sim <= 1.0);
    unsafe { cvqss_scheme_free(scheme) };
}

#[test]
fn adversary_leakage_vanishes_for_identical_secrets() {
    let scheme = make_scheme(2, 3, 42);
    let coalition = [2usize];
    let mut leak = f64::NAN;
    unsafe {
        let status = cvqss_adversary_leakage(
            scheme,
            coalition.as_ptr(),
            1,
            1.0,
            0.7,
            -0.1,
            0.7,
            -0.1,
            &mut leak,
        );
        assert_eq!(status, CvqssStatus::Ok);
        assert_eq!(leak, 0.0);

        let status = cvqss_adversary_leakage(
            scheme,
            coalition.as_ptr(),
            1,
            1.0,
            0.0,
            0.0,
            3.0,
            0.0,
            &mut leak,
        );
        assert_eq!(status, CvqssStatus::Ok);
        assert!(leak > 0.0 && leak <= 1.0);

        let oversized = [0usize, 1usize];
        let status = cvqss_adversary_leakage(
            scheme,
            oversized.as_ptr(),
            2,
            1.0,
            0.0,
            0.0,
            1.0,
            0.0,
            &mut leak,
        );
        assert_eq!(status, CvqssStatus::BadSubset);
        cvqss_scheme_free(scheme);
    }
}

#[test]
fn null_pointers_are_reported_not_dereferenced() {
    let subset = [0usize, 1usize];
    unsafe {
        let mut scheme: *mut CvqssScheme = ptr::null_mut();
        assert_eq!(cvqss_scheme_generate(2, 3, 1, ptr::null_mut()), CvqssStatus::NullPointer);
        assert_eq!(cvqss_scheme_from_json(ptr::null(), &mut scheme), CvqssStatus::NullPointer);
        assert_eq!(cvqss_scheme_to_json(ptr::null(), ptr::null_mut()), CvqssStatus::NullPointer);
        assert_eq!(cvqss_scheme_k(ptr::null()), 0);
        assert_eq!(cvqss_scheme_n(ptr::null()), 0);

        let mut plan: *mut CvqssPlan = ptr::null_mut();
        assert_eq!(
            cvqss_plan_build(ptr::null(), subset.as_ptr(), 2, ptr::null(), &mut plan),
            CvqssStatus::NullPointer
        );
        let real = make_scheme(2, 3, 1);
        assert_eq!(
            cvqss_plan_build(real, ptr::null(), 2, ptr::null(), &mut plan),
            CvqssStatus::NullPointer
        );
        assert!(cvqss_plan_r1(ptr::null()).is_nan());
        assert!(cvqss_plan_total_squeezing(ptr::null()).is_nan());
        assert_eq!(cvqss_plan_to_json(ptr::null(), ptr::null_mut()), CvqssStatus::NullPointer);

        let mut f = 0.0f64;
        assert_eq!(cvqss_analytic_fidelity(0.5, 1.0, 1.0, ptr::null_mut()), CvqssStatus::NullPointer);
        assert_eq!(
            cvqss_end_to_end_fidelity(real, subset.as_ptr(), 2, 1.0, ptr::null(), 0.0, 0.0, &mut f, ptr::null_mut()),
            CvqssStatus::NullPointer
        );
        assert_eq!(cvqss_cost_minimize(0.6, 0.8, false, ptr::null_mut()), CvqssStatus::NullPointer);

        // frees tolerate NULL
        cvqss_scheme_free(ptr::null_mut());
        cvqss_plan_free(ptr::null_mut());
        cvqss_string_free(ptr::null_mut());
        cvqss_scheme_free(real);
    }
}

#[test]
fn status_names_are_stable() {
    unsafe {
        let ok = CStr::from_ptr(cvqss_status_name(CvqssStatus::Ok));
        assert_eq!(ok.to_str().unwrap(), "ok");
        let cloning = CStr::from_ptr(cvqss_status_name(CvqssStatus::NoCloning));
        assert!(cloning.to_str().unwrap().contains("cloning"));
        let panic = CStr::from_ptr(cvqss_status_name(CvqssStatus::InternalPanic));
        assert!(panic.to_str().unwrap().contains("panic"));
    }
}
