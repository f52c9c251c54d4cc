//! One test per acceptance criterion. Each prints its criterion line so a
//! full run reads as a checklist.

use cvqss::verify::{self, CriterionResult};

fn report(result: CriterionResult) {
    println!(
        "criterion {} {}: {} ({})",
        result.id,
        result.name,
        if result.passed { "PASS" } else { "FAIL" },
        result.details
    );
    assert!(result.passed, "criterion {} {}: {}", result.id, result.name, result.details);
}

#[test]
fn criterion_1_two_squeezer_structure() {
    report(verify::two_squeezer_structure(None));
}

#[test]
fn criterion_2_closed_form_vs_simulation() {
    report(verify::closed_form_vs_simulation());
}

#[test]
fn criterion_3_fidelity_curves() {
    report(verify::fidelity_curves());
}

#[test]
fn criterion_4_squeezing_minimization() {
    report(verify::squeezing_minimization());
}

#[test]
fn criterion_5_channel_vs_quadrature() {
    report(verify::channel_vs_quadrature());
}

#[test]
fn criterion_6_adversary_suppression() {
    report(verify::adversary_suppression());
}

#[test]
fn criterion_7_no_cloning_guard() {
    report(verify::no_cloning_guard());
}

#[test]
fn criterion_8_high_squeezing_limit() {
    report(verify::high_squeezing_limit());
}
