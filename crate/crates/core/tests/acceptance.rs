//! Acceptance suite: one test per registered verification criterion. Each
//! prints a single pass/fail line (visible with --nocapture) and asserts the
//! outcome.

use kisin_core::verify::{
    suite_alpha_recurrence, suite_basis_change_conjugation, suite_c1_sufficiency,
    suite_ext_dimension_bound, suite_gate_consistency, suite_string_classifier,
    suite_iso_equivalence, suite_normalization_roundtrip, suite_pls_regression,
    suite_shape_lemma, SuiteOutcome, SuiteStatus, SweepOptions,
};

fn check(criterion: &str, outcome: SuiteOutcome) {
    let verdict = match outcome.status {
        SuiteStatus::Pass => "PASS",
        SuiteStatus::Fail => "FAIL",
        SuiteStatus::Inconclusive => "INCONCLUSIVE",
    };
    println!("{verdict} {criterion} [{}]: {} cases", outcome.name, outcome.cases);
    for f in &outcome.failures {
        println!("  failure: {f}");
    }
    for n in &outcome.notes {
        println!("  note: {n}");
    }
    assert_eq!(
        outcome.status,
        SuiteStatus::Pass,
        "{criterion} did not pass: {:?}",
        outcome.failures
    );
}

fn opts() -> SweepOptions {
    SweepOptions::default()
}

#[test]
fn criterion_01_alpha_recurrence_exact() {
    check("criterion-01", suite_alpha_recurrence(&opts()));
}

#[test]
fn criterion_02_string_classifier_reassembles() {
    check("criterion-02", suite_string_classifier(&opts()));
}

#[test]
fn criterion_03_iso_criteria_agree() {
    check("criterion-03", suite_iso_equivalence(&opts()));
}

#[test]
fn criterion_04_sufficiency_implies_unique_model() {
    check("criterion-04", suite_c1_sufficiency(&opts()));
}

#[test]
fn criterion_05_shape_lemma_no_counterexamples() {
    check("criterion-05", suite_shape_lemma(&opts()));
}

#[test]
fn criterion_06_normalization_round_trip() {
    check("criterion-06", suite_normalization_roundtrip(&opts()));
}

#[test]
fn criterion_07_basis_change_matches_conjugation() {
    check("criterion-07", suite_basis_change_conjugation(&opts()));
}

#[test]
fn criterion_08_extension_dimension_bound() {
    check("criterion-08", suite_ext_dimension_bound(&opts()));
}

#[test]
fn criterion_09_swap_connectivity_and_frozen_pairs() {
    check("criterion-09", suite_pls_regression(&opts()));
}

#[test]
fn criterion_10_gate_consistency() {
    check("criterion-10", suite_gate_consistency(&opts()));
}

/// The registry lists all ten criteria, and the seeded-random suites are
/// reproducible under a fixed seed.
#[test]
fn registry_and_seeding() {
    let opts = SweepOptions { seed: 42, budget: 50_000_000 };
    assert_eq!(kisin_core::verify::desk_suite_names().len(), 10);

    for suite in [suite_normalization_roundtrip, suite_basis_change_conjugation] {
        let a = suite(&opts);
        let b = suite(&opts);
        assert_eq!(a.status, b.status);
        assert_eq!(a.cases, b.cases);
        assert_eq!(a.failures, b.failures);
    }
}
