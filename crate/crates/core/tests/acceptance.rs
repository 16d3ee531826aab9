//! Acceptance suite: one test per numbered validation criterion.
//!
//! Each test prints the criterion's pass/fail line plus its measured
//! sub-checks, then asserts the verdict. Criteria 1 and 7 exercise claims
//! that are numerically unattainable as stated (see the detail lines they
//! print); they are implemented faithfully and fail honestly.

use skinburst_core::validate::{run_criterion, CriterionReport};

fn run_and_assert(id: u8) {
    let report: CriterionReport = run_criterion(id);
    println!("{}", report.status_line());
    for line in &report.details {
        println!("  {line}");
    }
    assert!(report.passed, "{}", report.status_line());
}

#[test]
fn criterion_01_limit_spectra() {
    run_and_assert(1);
}

#[test]
fn criterion_02_closure_cross_validation() {
    run_and_assert(2);
}

#[test]
fn criterion_03_tangency_and_imaginary_gap() {
    run_and_assert(3);
}

#[test]
fn criterion_04_lyapunov_consistency() {
    run_and_assert(4);
}

#[test]
fn criterion_05_anomalous_energy_dependence() {
    run_and_assert(5);
}

#[test]
fn criterion_06_scale_free_collapse() {
    run_and_assert(6);
}

#[test]
fn criterion_07_single_impurity_burst() {
    run_and_assert(7);
}

#[test]
fn criterion_08_scan_curve_shapes() {
    run_and_assert(8);
}

#[test]
fn criterion_09_multi_impurity_hierarchy() {
    run_and_assert(9);
}

#[test]
fn criterion_10_property_sweep() {
    run_and_assert(10);
}
