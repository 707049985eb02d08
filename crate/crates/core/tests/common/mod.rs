//! Independent oracles shared by the integration suites.
//!
//! Everything here recomputes results by direct enumeration, deliberately
//! avoiding the pruned/backtracking code paths under test.

use num_bigint::BigUint;
use partreg_core::pattern::{Assignment, InstanceValues, Pattern};
use std::collections::{BTreeMap, BTreeSet};

/// All instance value sets of `p` within `[1, n]` by plain odometer
/// enumeration of every assignment, using the arbitrary-precision
/// evaluator. Singletons are included; degenerate assignments of a
/// distinct-values pattern are dropped.
pub fn oracle_instances(p: &Pattern, n: u64) -> BTreeSet<Vec<u64>> {
    let k = p.variables().len();
    let bound = BigUint::from(n);
    let mut vals = vec![1u64; k];
    let mut out = BTreeSet::new();
    loop {
        let asg = Assignment::from_pairs(p.variables().iter().cloned().zip(vals.iter().copied()));
        if let InstanceValues::Values(values) = p.instantiate(&asg).expect("all variables bound") {
            if values.iter().all(|v| *v <= bound) {
                out.insert(
                    values
                        .iter()
                        .map(|v| u64::try_from(v).expect("value ≤ n"))
                        .collect(),
                );
            }
        }
        if !advance(&mut vals, n) {
            return out;
        }
    }
}

/// First avoiding coloring of `[1, n]` in plain odometer order over all
/// `r^n` color vectors, or `None` if every coloring has a monochromatic
/// instance with ≥ 2 values.
pub fn oracle_exhaustive_avoiding(p: &Pattern, r: u32, n: u64) -> Option<Vec<u32>> {
    let constraints: Vec<Vec<u64>> = oracle_instances(p, n)
        .into_iter()
        .filter(|inst| inst.len() >= 2)
        .collect();
    let mut colors = vec![0u32; n as usize];
    loop {
        let avoiding = constraints.iter().all(|inst| {
            let first = colors[inst[0] as usize - 1];
            !inst[1..].iter().all(|&v| colors[v as usize - 1] == first)
        });
        if avoiding {
            return Some(colors);
        }
        if !advance_colors(&mut colors, r) {
            return None;
        }
    }
}

/// Nonempty-subset sums by iterative bitmask loop; each value keeps the
/// witness of its numerically smallest mask.
pub fn oracle_subset_sums(xs: &[BigUint]) -> BTreeMap<BigUint, Vec<u32>> {
    let mut out: BTreeMap<BigUint, Vec<u32>> = BTreeMap::new();
    for mask in 1u32..(1u32 << xs.len()) {
        let mut sum = BigUint::from(0u32);
        let mut indices = Vec::new();
        for (i, x) in xs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum += x;
                indices.push(i as u32 + 1);
            }
        }
        out.entry(sum).or_insert(indices);
    }
    out
}

fn advance(vals: &mut [u64], bound: u64) -> bool {
    for slot in vals.iter_mut().rev() {
        if *slot < bound {
            *slot += 1;
            return true;
        }
        *slot = 1;
    }
    false
}

fn advance_colors(colors: &mut [u32], r: u32) -> bool {
    for slot in colors.iter_mut().rev() {
        if *slot + 1 < r {
            *slot += 1;
            return true;
        }
        *slot = 0;
    }
    false
}
