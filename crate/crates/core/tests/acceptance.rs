//! Acceptance gate: ten numbered criteria, one test per criterion, each
//! printing a single pass/fail line (visible with `--nocapture` or on
//! failure) and enforcing the stated instance counts and time budgets.

use openimage_core::verify::{self, SuiteOutcome};
use std::time::{Duration, Instant};

const SEED: u64 = 271_828_182_845;

fn gate(num: u32, label: &str, budget: Option<Duration>, outcome: SuiteOutcome, spent: Duration) {
    let status = if outcome.passed { "PASS" } else { "FAIL" };
    println!(
        "[{status}] criterion {num}: {label} — {}/{} instances clean in {spent:.2?} — {}",
        outcome.trials - outcome.failures,
        outcome.trials,
        outcome.detail,
    );
    if let Some(b) = budget {
        assert!(spent < b, "criterion {num} exceeded its {b:?} budget: {spent:.2?}");
    }
    assert!(outcome.passed, "criterion {num} failed: {}", outcome.detail);
}

#[test]
fn criterion_01_lifted_roots_match_exhaustive_search() {
    let clock = Instant::now();
    let o = verify::hensel_oracle_suite(SEED);
    let spent = clock.elapsed();
    assert_eq!(o.trials, 3000, "1000 planted instances per (l, N) pair");
    gate(
        1,
        "every lifted root appears in the exhaustive root list at the predicted distance",
        Some(Duration::from_secs(10)),
        o,
        spent,
    );
}

#[test]
fn criterion_02_defect_inequality_on_random_and_exhaustive_instances() {
    let clock = Instant::now();
    let o = verify::eigen_defect_suite(SEED);
    let spent = clock.elapsed();
    assert_eq!(o.trials, 100_000 + 707_616, "10^5 random plus the full mod-27 sweep");
    gate(
        2,
        "val(p_g(lambda)) >= n - b on every congruence instance",
        Some(Duration::from_secs(30)),
        o,
        spent,
    );
}

#[test]
fn criterion_03_adjoint_charpoly_identity() {
    let clock = Instant::now();
    let o = verify::adjoint_charpoly_suite(SEED);
    let spent = clock.elapsed();
    assert_eq!(o.trials, 30_000, "10^4 traceless matrices per prime");
    gate(3, "t^3 + 4 det(g) t matches the expanded 3x3 form exactly", None, o, spent);
}

#[test]
fn criterion_04_intertwiner_reconstruction_round_trip() {
    let clock = Instant::now();
    let o = verify::inner_reconstruction_suite(SEED);
    let spent = clock.elapsed();
    assert_eq!(o.trials, 600, "200 noisy conjugation instances per parameter set");
    gate(
        4,
        "constructed intertwiners certify the predicted depth, determinant cap, and traces",
        Some(Duration::from_secs(60)),
        o,
        spent,
    );
}

#[test]
fn criterion_05_product_subgroup_exponent_predictions() {
    let clock = Instant::now();
    let o = verify::goursat_products_suite();
    let spent = clock.elapsed();
    assert_eq!(o.trials, 20, "twenty constructed product subgroups");
    gate(
        5,
        "pairwise-depth scan predicts a contained ball in all twenty product subgroups",
        Some(Duration::from_secs(60)),
        o,
        spent,
    );
}

#[test]
fn criterion_06_ball_index_lagrange_identity() {
    let clock = Instant::now();
    let o = verify::ball_index_suite();
    let spent = clock.elapsed();
    assert_eq!(o.trials, 3);
    gate(6, "index formula times enumerated ball order equals group order", None, o, spent);
}

#[test]
fn criterion_07_conjugation_stable_depth_gain() {
    let clock = Instant::now();
    let o = verify::conjugation_gain_suite(SEED);
    let spent = clock.elapsed();
    assert_eq!(o.trials, 100, "one hundred planted conjugation-closed lattices");
    gate(7, "every planted depth-t lattice contains the depth-(t+4) scaled algebra", None, o, spent);
}

#[test]
fn criterion_08_bound_constants_verbatim() {
    let clock = Instant::now();
    let o = verify::bound_constants_suite();
    let spent = clock.elapsed();
    gate(8, "all fixed constants appear verbatim in the bounds report", None, o, spent);
}

#[test]
fn criterion_09_dominance_grid_and_headline_landmark() {
    let clock = Instant::now();
    let o = verify::dominance_suite();
    let spent = clock.elapsed();
    assert_eq!(o.trials, 19, "18 grid cells plus the landmark comparison");
    gate(
        9,
        "headline bound dominates the grid and reproduces the recorded landmark",
        None,
        o,
        spent,
    );
}

#[test]
fn criterion_10_reports_are_byte_identical_across_runs() {
    let clock = Instant::now();
    let first = serde_json::to_string_pretty(&verify::run_all(SEED)).expect("report serializes");
    let second = serde_json::to_string_pretty(&verify::run_all(SEED)).expect("report serializes");
    let spent = clock.elapsed();
    let passed = first == second;
    println!(
        "[{}] criterion 10: two seeded runs serialize to byte-identical reports \
         ({} bytes) in {spent:.2?}",
        if passed { "PASS" } else { "FAIL" },
        first.len(),
    );
    assert_eq!(first, second, "seeded verification reports must not diverge");
}
