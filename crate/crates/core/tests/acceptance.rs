//! One PASS/FAIL line per verification suite.
//!
//! Suite 3 compares the observed discontinuities of the elliptic Q function
//! against the jump set `s₀ + λT ∈ π + 2πℤ`. The closed form (from the
//! defining Fourier series) jumps at `s₀ + λT ∈ 2πℤ` instead, so that check
//! is expected to fail; every other check in that suite must pass.

use grauert::report::CriterionReport;
use grauert::verify;

const STATED_JUMP_CHECK: &str = "jump distance to {s0 + lambda T in pi + 2piZ}";

fn show(r: &CriterionReport) {
    println!("{}", r.line());
    for c in &r.checks {
        println!(
            "    [{}] {} expected {} observed {} ({})",
            if c.passed { "ok" } else { "XX" },
            c.name,
            c.expected,
            c.observed,
            c.provenance
        );
    }
}

fn assert_green(r: &CriterionReport) {
    show(r);
    assert!(r.passed(), "{}", r.line());
}

#[test]
fn criterion_1_circle_closed_form() {
    assert_green(&verify::circle_closed_form());
}

#[test]
fn criterion_2_matrix_elements() {
    assert_green(&verify::matrix_element_agreement());
}

#[test]
fn criterion_3_elliptic_sawtooth() {
    let r = verify::elliptic_sawtooth();
    show(&r);
    assert!(r.error.is_none(), "{}", r.line());
    for c in &r.checks {
        if c.name == STATED_JUMP_CHECK {
            // the documented contradiction: jumps sit half a period away
            assert!(!c.passed, "stated jump set unexpectedly matched: {}", c.observed);
        } else {
            assert!(c.passed, "{}: expected {}, observed {}", c.name, c.expected, c.observed);
        }
    }
    assert!(r.checks.iter().any(|c| c.name == STATED_JUMP_CHECK));
}

#[test]
fn criterion_4_torus() {
    assert_green(&verify::torus_suite());
}

#[test]
fn criterion_5_sphere_extremals() {
    assert_green(&verify::sphere_extremals());
}

#[test]
fn criterion_6_period_coefficients() {
    assert_green(&verify::period_coefficients());
}

#[test]
fn criterion_7_beams() {
    assert_green(&verify::beam_suite());
}

#[test]
fn criterion_8_jumps_and_universal_bound() {
    assert_green(&verify::jumps_and_universal_bound());
}
