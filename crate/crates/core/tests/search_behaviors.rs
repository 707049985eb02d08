//! Cross-cutting behaviors of the avoidance search: monotonicity,
//! CNF/search agreement, the exponential transfer map, determinism.

mod common;

use common::oracle_exhaustive_avoiding;
use partreg_core::cnf::{export_cnf, model_to_coloring, solve};
use partreg_core::pattern::parse_pattern;
use partreg_core::presets;
use partreg_core::search::{
    enumerate_instances, find_avoiding, rado_number, verify_avoidance, SearchOutcome,
};

const BUDGET: u64 = 1 << 24;

#[test]
fn forced_verdicts_are_monotone_in_n() {
    for (name, text) in presets::all() {
        let p = parse_pattern(text).unwrap();
        let mut forced_seen = false;
        for n in 1..=12 {
            let forced = matches!(
                find_avoiding(&p, 2, n, BUDGET).unwrap(),
                SearchOutcome::Forced { .. }
            );
            assert!(
                !forced_seen || forced,
                "{name}: avoidable at {n} after being forced below"
            );
            forced_seen |= forced;
        }
    }
}

#[test]
fn forcing_numbers_nondecreasing_in_colors() {
    for (name, text) in presets::all() {
        let p = parse_pattern(text).unwrap();
        let one = rado_number(&p, 1, 20, BUDGET).unwrap();
        let two = rado_number(&p, 2, 20, BUDGET).unwrap();
        let f1 = one.forcing_n.unwrap_or(u64::MAX);
        let f2 = two.forcing_n.unwrap_or(u64::MAX);
        assert!(f1 <= f2, "{name}: forcing dropped from r=1 ({f1}) to r=2 ({f2})");
    }
}

#[test]
fn cnf_satisfiability_matches_the_search() {
    for (name, text) in presets::all() {
        let p = parse_pattern(text).unwrap();
        for r in 1..=2u32 {
            for n in 1..=10u64 {
                let outcome = find_avoiding(&p, r, n, BUDGET).unwrap();
                let doc = export_cnf(&p, r, n).unwrap();
                match (solve(&doc), &outcome) {
                    (Some(model), SearchOutcome::Avoiding(_)) => {
                        let coloring = model_to_coloring(&model, n, r).expect("total model");
                        assert!(
                            verify_avoidance(&coloring, &p).unwrap(),
                            "{name} r={r} n={n}: SAT model decodes to a bad coloring"
                        );
                    }
                    (None, SearchOutcome::Forced { .. }) => {}
                    (sat, other) => panic!(
                        "{name} r={r} n={n}: CNF says {:?}, search says {other:?}",
                        sat.map(|_| "sat")
                    ),
                }
            }
        }
    }
}

/// Under n ↦ 2^n, instances of {a, b, a+b} in [1, k] correspond exactly to
/// the instances of {a, b, ab} in [1, 2^k] whose values are all powers of
/// two with positive exponent.
#[test]
fn exponential_transfer_small() {
    let additive = parse_pattern(presets::SCHUR).unwrap();
    let multiplicative = parse_pattern(presets::MULT_SCHUR).unwrap();
    for k in 1..=6u32 {
        let add_table = enumerate_instances(&additive, k as u64).unwrap();
        let mapped: std::collections::BTreeSet<Vec<u64>> = add_table
            .instances()
            .iter()
            .map(|inst| inst.iter().map(|&v| 1u64 << v).collect())
            .collect();
        let mult_table = enumerate_instances(&multiplicative, 1u64 << k).unwrap();
        let powers: std::collections::BTreeSet<Vec<u64>> = mult_table
            .instances()
            .iter()
            .filter(|inst| inst.iter().all(|&v| v >= 2 && v.is_power_of_two()))
            .cloned()
            .collect();
        assert_eq!(mapped, powers, "k = {k}");
    }
}

#[test]
fn identical_inputs_give_identical_outcomes() {
    let p = parse_pattern(presets::PRODUCT_QUAD).unwrap();
    let a = rado_number(&p, 2, 20, BUDGET).unwrap();
    let b = rado_number(&p, 2, 20, BUDGET).unwrap();
    assert_eq!(a.forcing_n, b.forcing_n);
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(
        a.avoiding_at_prev.map(|c| c.colors().to_vec()),
        b.avoiding_at_prev.map(|c| c.colors().to_vec())
    );
}

#[test]
fn engine_and_oracle_agree_on_a_spot_check() {
    // deeper spot check at one size beyond the unit tests
    let p = parse_pattern(presets::SHIFTED_PRODUCT).unwrap();
    for n in 1..=10 {
        let engine = matches!(
            find_avoiding(&p, 2, n, BUDGET).unwrap(),
            SearchOutcome::Avoiding(_)
        );
        let oracle = oracle_exhaustive_avoiding(&p, 2, n).is_some();
        assert_eq!(engine, oracle, "n = {n}");
    }
}
