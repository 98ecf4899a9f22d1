//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Heavy sweeps are memoized inside `chartax::verify`, so ordering
//! between tests does not matter.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use std::sync::Mutex;

use chartax::verify;

// Criteria carry their own runtime budgets, so they must not contend for
// cores; this serializes them while letting each use rayon internally.
static GATE: Mutex<()> = Mutex::new(());

fn check(run: impl FnOnce() -> chartax::verify::CriterionOutcome) {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let outcome = run();
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_fejer_identity() {
    check(verify::criterion_01_fejer);
}

#[test]
fn criterion_02_character_group() {
    check(verify::criterion_02_characters);
}

#[test]
fn criterion_03_decomposition_identity() {
    check(verify::criterion_03_decomposition);
}

#[test]
fn criterion_04_theorem1_chain() {
    check(verify::criterion_04_chain);
}

#[test]
fn criterion_05_dichotomy_envelope() {
    check(verify::criterion_05_dichotomy);
}

#[test]
fn criterion_06_extremal_sharpness() {
    check(verify::criterion_06_extremal);
}

#[test]
fn criterion_07_combination_inequalities() {
    check(verify::criterion_07_combination);
}

#[test]
fn criterion_08_taxonomy_structural_closure() {
    check(verify::criterion_08_taxonomy_structure);
}

#[test]
fn criterion_09_residual_envelope_stability() {
    check(verify::criterion_09_envelope_stability);
}

#[test]
fn criterion_10_selberg_pv_large_sieve() {
    check(verify::criterion_10_large_sieve);
}

#[test]
fn criterion_11_smooth_progressions() {
    check(verify::criterion_11_smooth);
}

#[test]
fn criterion_12_halasz_bound() {
    check(verify::criterion_12_halasz);
}

#[test]
fn criterion_13_runtime_budgets() {
    // the quick suite (criteria 1-3, 6, 7) under its own budget
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    for o in verify::run_quick() {
        println!("{}", o.line());
        assert!(o.passed, "{}", o.line());
    }
}
