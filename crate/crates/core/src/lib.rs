//! Combinatorial engine for partition-regular arithmetic patterns on the
//! positive integers.
//!
//! The central question: given a pattern such as `{a, b, a+b}` or
//! `{a, b, ab, (a+1)b}` and a number of colors `r`, what is the least `N`
//! such that every `r`-coloring of `[1, N]` contains a monochromatic
//! instance of the pattern? This crate computes such forcing numbers with
//! certificates (an avoiding coloring one below, an exhaustive refutation
//! at the bound), finds monochromatic witnesses in explicit colorings,
//! exports the avoidance problem as DIMACS CNF, and provides the
//! finite-sums (IP-set) toolkit needed to replay the iterated
//! shift-intersect-dilate descent that produces monochromatic sets of the
//! form `{a, b, ab, (a+1)b}` under any coloring rule.
//!
//! Modules:
//! - [`pattern`] — the pattern DSL: arithmetic terms over variables,
//!   parsing, arbitrary-precision evaluation, instantiation.
//! - [`coloring`] — explicit colorings of `[1, N]` and their text format.
//! - [`fs`] — generating sequences, finite-sum sets with subset witnesses,
//!   shift/dilation operations, divisibility extraction, FS-subsequence
//!   search.
//! - [`search`] — instance enumeration, backtracking avoidance search,
//!   forcing numbers, witness finding, certificate verification.
//! - [`cnf`] — DIMACS export of the avoidance problem and a miniature
//!   DPLL solver used to validate exports without an external solver.
//! - [`simulate`] — stage-by-stage descent simulation under intensional
//!   coloring rules, producing fully verified traces.

pub mod cnf;
pub mod coloring;
pub mod fs;
pub mod pattern;
pub mod presets;
pub mod search;
pub mod simulate;

/// Deterministic work allowance measured in search nodes.
///
/// Budgets are node counts rather than wall time so that outcomes are
/// reproducible across machines. A budget is shared mutably across the
/// sub-searches of a compound operation.
#[derive(Debug, Clone)]
pub struct NodeBudget {
    remaining: u64,
    spent: u64,
}

impl NodeBudget {
    pub fn new(nodes: u64) -> Self {
        NodeBudget {
            remaining: nodes,
            spent: 0,
        }
    }

    /// A budget that will not run out in practice.
    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    /// Consumes `n` nodes; returns false (leaving the budget unchanged)
    /// when fewer than `n` remain.
    pub fn try_spend(&mut self, n: u64) -> bool {
        if self.remaining < n {
            return false;
        }
        self.remaining -= n;
        self.spent += n;
        true
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    pub fn spent(&self) -> u64 {
        self.spent
    }
}
