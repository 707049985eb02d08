//! Avoidance search and forcing numbers.
//!
//! An *instance* of a pattern within `[1, n]` is the collapsed value set
//! of the terms under some assignment of the variables to `[1, n]` with
//! every term value ≤ n. A coloring *avoids* the pattern when no instance
//! with at least two distinct values is monochromatic; fully collapsed
//! (singleton) instances are recorded but constrain nothing — a
//! one-element set is trivially monochromatic and would make avoidance
//! meaningless, so they are excluded from search, verification and
//! witness finding alike.
//!
//! [`find_avoiding`] colors `1, 2, ..., n` in order by chronological
//! backtracking, checking after each placement exactly the instances whose
//! maximum was just colored. Color symmetry is broken by fixing the color
//! of 1 to 0 and allowing a new color only once all smaller colors appear
//! earlier; forcing numbers are invariant under color permutation, so the
//! Forced/Avoiding verdict is unaffected. Budgets are node counts
//! (placement attempts), never wall time, so outcomes are reproducible.

use crate::coloring::{Color, Coloring};
use crate::pattern::{Assignment, Pattern, Term};
use crate::NodeBudget;
use num_bigint::BigUint;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::ControlFlow;
use thiserror::Error;

/// Guard on the number of pattern variables for instance enumeration.
pub const MAX_PATTERN_VARS: usize = 4;
/// Memory cap on the number of distinct instances in a table.
pub const MAX_INSTANCES: usize = 1_000_000;
/// Interval bound cap keeping every term value inside 64-bit arithmetic.
pub const MAX_INTERVAL_BOUND: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("pattern has {0} variables; the enumeration guard allows at most {MAX_PATTERN_VARS}")]
    TooManyVariables(usize),
    #[error("instance table exceeds the cap of {0} instances")]
    InstanceCap(usize),
    #[error("interval bound {0} exceeds the 64-bit guard of 2^32")]
    BoundTooLarge(u64),
    #[error("interval bound must be ≥ 1")]
    ZeroBound,
    #[error("number of colors must be ≥ 1")]
    ZeroColors,
}

/// All instances of a pattern within `[1, n]`, deduplicated by value set,
/// with an index from each integer to the instances whose maximum it is.
/// Singleton instances stay in `instances` but never enter the index.
#[derive(Debug, Clone)]
pub struct InstanceTable {
    n: u64,
    instances: Vec<Vec<u64>>,
    index: HashMap<u64, Vec<u32>>,
}

impl InstanceTable {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Sorted value sets, lexicographically ordered, singletons included.
    pub fn instances(&self) -> &[Vec<u64>] {
        &self.instances
    }

    /// Instances with ≥ 2 values whose maximum equals `m`.
    pub fn at_max(&self, m: u64) -> &[u32] {
        self.index.get(&m).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of instances that actually constrain a coloring.
    pub fn constraint_count(&self) -> usize {
        self.instances.iter().filter(|inst| inst.len() >= 2).count()
    }
}

/// How a Forced verdict was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    InternalSearch,
    Cnf,
}

impl fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchMethod::InternalSearch => write!(f, "internal-search"),
            SearchMethod::Cnf => write!(f, "cnf"),
        }
    }
}

/// Outcome of an avoidance search at a fixed bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A verified coloring of `[1, n]` with no monochromatic instance.
    Avoiding(Coloring),
    /// Exhaustive refutation: every canonical coloring fails.
    Forced {
        n: u64,
        nodes: u64,
        method: SearchMethod,
    },
    /// Budget ran out; `best_lower_bound` is the longest prefix `[1, m]`
    /// that was verified avoidable along the way.
    Unknown { nodes: u64, best_lower_bound: u64 },
}

/// Forcing-number computation result with its certificate pair.
#[derive(Debug, Clone)]
pub struct RadoResult {
    pub pattern: String,
    pub colors: Color,
    /// Least `n` with no avoiding coloring, when established.
    pub forcing_n: Option<u64>,
    /// Largest `n` verified avoidable.
    pub lower_bound: u64,
    /// Avoiding coloring of `[1, forcing_n − 1]` (or of `[1, lower_bound]`).
    pub avoiding_at_prev: Option<Coloring>,
    pub nodes: u64,
    pub method: SearchMethod,
}

impl RadoResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "pattern": self.pattern,
            "colors": self.colors,
            "forcing_n": self.forcing_n,
            "lower_bound": self.lower_bound,
            "avoiding_coloring": self
                .avoiding_at_prev
                .as_ref()
                .map(|c| c.colors().to_vec()),
            "nodes": self.nodes,
            "method": self.method.to_string(),
        })
    }
}

/// Enumerates all instances of `p` within `[1, n]`.
pub fn enumerate_instances(p: &Pattern, n: u64) -> Result<InstanceTable, SearchError> {
    let mut set: BTreeSet<Vec<u64>> = BTreeSet::new();
    let flow = for_each_instance(p, n, &mut |_vals, term_values| {
        let mut values: Vec<u64> = term_values.to_vec();
        values.sort_unstable();
        values.dedup();
        set.insert(values);
        if set.len() > MAX_INSTANCES {
            return ControlFlow::Break(SearchError::InstanceCap(MAX_INSTANCES));
        }
        ControlFlow::Continue(())
    })?;
    if let Some(err) = flow {
        return Err(err);
    }
    let instances: Vec<Vec<u64>> = set.into_iter().collect();
    let mut index: HashMap<u64, Vec<u32>> = HashMap::new();
    for (id, inst) in instances.iter().enumerate() {
        if inst.len() >= 2 {
            let max = *inst.last().expect("instances are nonempty");
            index.entry(max).or_default().push(id as u32);
        }
    }
    Ok(InstanceTable {
        n,
        instances,
        index,
    })
}

/// Searches for an avoiding `r`-coloring of `[1, n]` within `budget`
/// placement attempts.
pub fn find_avoiding(
    p: &Pattern,
    r: Color,
    n: u64,
    budget: u64,
) -> Result<SearchOutcome, SearchError> {
    let mut budget = NodeBudget::new(budget);
    find_avoiding_with(p, r, n, &mut budget)
}

pub(crate) fn find_avoiding_with(
    p: &Pattern,
    r: Color,
    n: u64,
    budget: &mut NodeBudget,
) -> Result<SearchOutcome, SearchError> {
    if r == 0 {
        return Err(SearchError::ZeroColors);
    }
    let table = enumerate_instances(p, n)?;
    let spent_before = budget.spent();

    let mut colors: Vec<Color> = Vec::with_capacity(n as usize);
    // distinct_stack[d] = number of distinct colors among colors[0..d]
    let mut distinct_stack: Vec<Color> = vec![0];
    let mut candidate: Color = 0;
    let mut best_prefix: u64 = 0;

    loop {
        let depth = colors.len();
        if depth as u64 == n {
            let coloring = Coloring::new(r, colors).expect("colors are in range");
            assert!(
                verify_avoidance(&coloring, p)?,
                "search returned a coloring that fails independent verification"
            );
            return Ok(SearchOutcome::Avoiding(coloring));
        }
        let distinct = distinct_stack[depth];
        let limit = (r - 1).min(distinct);
        if candidate > limit {
            // all colors exhausted at this position
            if depth == 0 {
                return Ok(SearchOutcome::Forced {
                    n,
                    nodes: budget.spent() - spent_before,
                    method: SearchMethod::InternalSearch,
                });
            }
            distinct_stack.pop();
            candidate = colors.pop().expect("depth > 0") + 1;
            continue;
        }
        if !budget.try_spend(1) {
            return Ok(SearchOutcome::Unknown {
                nodes: budget.spent() - spent_before,
                best_lower_bound: best_prefix,
            });
        }
        let m = depth as u64 + 1;
        colors.push(candidate);
        if no_new_monochromatic(&table, m, &colors) {
            best_prefix = best_prefix.max(m);
            distinct_stack.push(distinct.max(candidate + 1));
            candidate = 0;
        } else {
            colors.pop();
            candidate += 1;
        }
    }
}

/// Checks the instances whose maximum is `m`; all their values are ≤ m and
/// therefore already colored.
fn no_new_monochromatic(table: &InstanceTable, m: u64, colors: &[Color]) -> bool {
    for &id in table.at_max(m) {
        let inst = &table.instances()[id as usize];
        let first = colors[inst[0] as usize - 1];
        if inst[1..].iter().all(|&v| colors[v as usize - 1] == first) {
            return false;
        }
    }
    true
}

/// Computes the forcing number by increasing `n` from 1 until the first
/// exhaustive refutation, carrying the avoiding coloring found one step
/// earlier as the lower-bound certificate. The budget is shared across
/// the whole sweep.
pub fn rado_number(
    p: &Pattern,
    r: Color,
    n_max: u64,
    budget: u64,
) -> Result<RadoResult, SearchError> {
    if n_max == 0 {
        return Err(SearchError::ZeroBound);
    }
    let mut budget = NodeBudget::new(budget);
    let mut last_avoiding: Option<Coloring> = None;
    for n in 1..=n_max {
        match find_avoiding_with(p, r, n, &mut budget)? {
            SearchOutcome::Avoiding(c) => last_avoiding = Some(c),
            SearchOutcome::Forced { .. } => {
                if let Some(prev) = &last_avoiding {
                    assert!(
                        verify_avoidance(prev, p)?,
                        "lower-bound certificate fails verification"
                    );
                }
                return Ok(RadoResult {
                    pattern: p.to_string(),
                    colors: r,
                    forcing_n: Some(n),
                    lower_bound: n - 1,
                    avoiding_at_prev: last_avoiding,
                    nodes: budget.spent(),
                    method: SearchMethod::InternalSearch,
                });
            }
            SearchOutcome::Unknown { .. } => {
                return Ok(RadoResult {
                    pattern: p.to_string(),
                    colors: r,
                    forcing_n: None,
                    lower_bound: n - 1,
                    avoiding_at_prev: last_avoiding,
                    nodes: budget.spent(),
                    method: SearchMethod::InternalSearch,
                });
            }
        }
    }
    Ok(RadoResult {
        pattern: p.to_string(),
        colors: r,
        forcing_n: None,
        lower_bound: n_max,
        avoiding_at_prev: last_avoiding,
        nodes: budget.spent(),
        method: SearchMethod::InternalSearch,
    })
}

/// Finds the lexicographically least assignment (by variable order, then
/// value) whose instance is monochromatic in `c`, together with the shared
/// color. Singleton instances do not count.
pub fn find_witness(
    c: &Coloring,
    p: &Pattern,
) -> Result<Option<(Assignment, Color)>, SearchError> {
    let hit = for_each_instance(p, c.n(), &mut |vals, term_values| {
        let mut values: Vec<u64> = term_values.to_vec();
        values.sort_unstable();
        values.dedup();
        if values.len() < 2 {
            return ControlFlow::Continue(());
        }
        let first = c.colors()[values[0] as usize - 1];
        if values[1..].iter().all(|&v| c.colors()[v as usize - 1] == first) {
            let mut asg = Assignment::new();
            for (name, &value) in p.variables().iter().zip(vals) {
                asg.set(name.clone(), BigUint::from(value));
            }
            return ControlFlow::Break((asg, first));
        }
        ControlFlow::Continue(())
    })?;
    Ok(hit)
}

/// Re-checks a coloring against every instance by full enumeration,
/// independent of any search bookkeeping. True iff no instance with ≥ 2
/// distinct values is monochromatic.
pub fn verify_avoidance(c: &Coloring, p: &Pattern) -> Result<bool, SearchError> {
    let hit = for_each_instance(p, c.n(), &mut |_vals, term_values| {
        let mut values: Vec<u64> = term_values.to_vec();
        values.sort_unstable();
        values.dedup();
        if values.len() < 2 {
            return ControlFlow::Continue(());
        }
        let first = c.colors()[values[0] as usize - 1];
        if values[1..].iter().all(|&v| c.colors()[v as usize - 1] == first) {
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    Ok(hit.is_none())
}

/// Term compiled against the pattern's variable order for u64 evaluation.
enum CompiledTerm {
    Var(usize),
    Const(u64),
    Sum(Vec<CompiledTerm>),
    Product(Vec<CompiledTerm>),
}

impl CompiledTerm {
    fn compile(term: &Term, vars: &[String]) -> Self {
        match term {
            Term::Variable(name) => {
                let idx = vars
                    .iter()
                    .position(|v| v == name)
                    .expect("pattern variables cover all terms");
                CompiledTerm::Var(idx)
            }
            Term::Constant(v) => CompiledTerm::Const(*v),
            Term::Sum(children) => {
                CompiledTerm::Sum(children.iter().map(|c| Self::compile(c, vars)).collect())
            }
            Term::Product(children) => {
                CompiledTerm::Product(children.iter().map(|c| Self::compile(c, vars)).collect())
            }
        }
    }

    /// Checked evaluation; `None` means the value overflows u64 and hence
    /// certainly exceeds any bound within [`MAX_INTERVAL_BOUND`].
    fn eval(&self, vals: &[u64]) -> Option<u64> {
        match self {
            CompiledTerm::Var(idx) => Some(vals[*idx]),
            CompiledTerm::Const(v) => Some(*v),
            CompiledTerm::Sum(children) => {
                let mut total: u64 = 0;
                for child in children {
                    total = total.checked_add(child.eval(vals)?)?;
                }
                Some(total)
            }
            CompiledTerm::Product(children) => {
                let mut total: u64 = 1;
                for child in children {
                    total = total.checked_mul(child.eval(vals)?)?;
                }
                Some(total)
            }
        }
    }
}

/// Visits every assignment of the pattern variables to `[1, n]` whose term
/// values all lie in `[1, n]`, in lexicographic order, passing the
/// assignment and the exact term values. Assignments that collide under a
/// `distinct_values` pattern are skipped. Every term is weakly monotone in
/// every variable (all operations are `+`/`×` over positives), so once the
/// minimal completion of a prefix exceeds `n` the value loop can stop.
fn for_each_instance<B>(
    p: &Pattern,
    n: u64,
    visit: &mut impl FnMut(&[u64], &[u64]) -> ControlFlow<B>,
) -> Result<Option<B>, SearchError> {
    if n == 0 {
        return Err(SearchError::ZeroBound);
    }
    if n > MAX_INTERVAL_BOUND {
        return Err(SearchError::BoundTooLarge(n));
    }
    let k = p.variables().len();
    if k > MAX_PATTERN_VARS {
        return Err(SearchError::TooManyVariables(k));
    }
    let compiled: Vec<CompiledTerm> = p
        .terms()
        .iter()
        .map(|t| CompiledTerm::compile(t, p.variables()))
        .collect();
    let mut vals = vec![1u64; k];
    let mut term_values = vec![0u64; compiled.len()];
    Ok(descend(
        p, &compiled, n, 0, &mut vals, &mut term_values, visit,
    ))
}

fn descend<B>(
    p: &Pattern,
    compiled: &[CompiledTerm],
    n: u64,
    depth: usize,
    vals: &mut Vec<u64>,
    term_values: &mut Vec<u64>,
    visit: &mut impl FnMut(&[u64], &[u64]) -> ControlFlow<B>,
) -> Option<B> {
    let k = vals.len();
    for v in 1..=n {
        vals[depth] = v;
        // minimal completion: unassigned variables sit at 1
        for slot in vals[depth + 1..].iter_mut() {
            *slot = 1;
        }
        let mut fits = true;
        for (i, term) in compiled.iter().enumerate() {
            match term.eval(vals) {
                Some(value) if value <= n => term_values[i] = value,
                _ => {
                    fits = false;
                    break;
                }
            }
        }
        if !fits {
            // larger v only grows the offending term
            break;
        }
        if depth + 1 == k {
            // leaf: term_values are exact
            if p.distinct_values() && has_duplicate(term_values) {
                continue;
            }
            if let ControlFlow::Break(b) = visit(vals, term_values) {
                return Some(b);
            }
        } else if let Some(b) = descend(p, compiled, n, depth + 1, vals, term_values, visit) {
            return Some(b);
        }
    }
    None
}

fn has_duplicate(values: &[u64]) -> bool {
    for (i, a) in values.iter().enumerate() {
        if values[i + 1..].contains(a) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;

    fn schur() -> Pattern {
        parse_pattern("a, b, a+b").unwrap()
    }

    fn mult_schur() -> Pattern {
        parse_pattern("a, b, a*b").unwrap()
    }

    fn quad() -> Pattern {
        parse_pattern("a, b, a*b, (a+1)*b").unwrap()
    }

    #[test]
    fn schur_instances_at_three() {
        let table = enumerate_instances(&schur(), 3).unwrap();
        assert_eq!(table.instances(), &[vec![1, 2], vec![1, 2, 3]]);
        assert_eq!(table.at_max(2), &[0]);
        assert_eq!(table.at_max(3), &[1]);
    }

    #[test]
    fn quad_instances_at_two() {
        let table = enumerate_instances(&quad(), 2).unwrap();
        assert_eq!(table.instances(), &[vec![1, 2]]);
    }

    #[test]
    fn no_instances_below_the_pattern_floor() {
        let table = enumerate_instances(&schur(), 1).unwrap();
        assert!(table.instances().is_empty());
    }

    #[test]
    fn singletons_are_recorded_but_unindexed() {
        // a=b=1 collapses {a, b, ab} to {1}
        let table = enumerate_instances(&mult_schur(), 3).unwrap();
        assert!(table.instances().contains(&vec![1]));
        assert!(table.at_max(1).is_empty());
        assert_eq!(table.constraint_count(), table.instances().len() - 1);
    }

    #[test]
    fn variable_guard() {
        let p = parse_pattern("a+b+c+d+e").unwrap();
        assert!(matches!(
            enumerate_instances(&p, 5),
            Err(SearchError::TooManyVariables(5))
        ));
    }

    #[test]
    fn schur_avoidable_at_four() {
        match find_avoiding(&schur(), 2, 4, 1 << 20).unwrap() {
            SearchOutcome::Avoiding(c) => {
                assert_eq!(c.colors(), &[0, 1, 1, 0]);
                assert!(verify_avoidance(&c, &schur()).unwrap());
            }
            other => panic!("expected avoiding, got {other:?}"),
        }
    }

    #[test]
    fn schur_forced_at_five() {
        assert!(matches!(
            find_avoiding(&schur(), 2, 5, 1 << 20).unwrap(),
            SearchOutcome::Forced { n: 5, .. }
        ));
    }

    #[test]
    fn single_color_forced_at_two() {
        assert!(matches!(
            find_avoiding(&schur(), 1, 2, 1 << 20).unwrap(),
            SearchOutcome::Forced { n: 2, .. }
        ));
    }

    #[test]
    fn budget_exhaustion_reports_unknown() {
        match find_avoiding(&schur(), 2, 5, 3).unwrap() {
            SearchOutcome::Unknown {
                nodes,
                best_lower_bound,
            } => {
                assert_eq!(nodes, 3);
                assert!(best_lower_bound <= 3);
            }
            other => panic!("expected unknown, got {other:?}"),
        }
    }

    #[test]
    fn schur_forcing_number() {
        let result = rado_number(&schur(), 2, 20, 1 << 24).unwrap();
        assert_eq!(result.forcing_n, Some(5));
        assert_eq!(result.lower_bound, 4);
        let prev = result.avoiding_at_prev.unwrap();
        assert_eq!(prev.n(), 4);
        assert!(verify_avoidance(&prev, &schur()).unwrap());
    }

    #[test]
    fn multiplicative_schur_forcing_number() {
        let result = rado_number(&mult_schur(), 2, 20, 1 << 24).unwrap();
        assert_eq!(result.forcing_n, Some(4));
        let prev = result.avoiding_at_prev.unwrap();
        assert_eq!(prev.colors(), &[0, 1, 1]);
    }

    #[test]
    fn quad_single_color_forcing_number() {
        let result = rado_number(&quad(), 1, 10, 1 << 20).unwrap();
        assert_eq!(result.forcing_n, Some(2));
    }

    #[test]
    fn rado_reports_lower_bound_when_n_max_reached() {
        let result = rado_number(&schur(), 2, 3, 1 << 20).unwrap();
        assert_eq!(result.forcing_n, None);
        assert_eq!(result.lower_bound, 3);
        assert!(result.avoiding_at_prev.is_some());
    }

    #[test]
    fn witness_on_uniform_coloring() {
        let c = Coloring::new(1, vec![0; 4]).unwrap();
        let (asg, color) = find_witness(&c, &quad()).unwrap().unwrap();
        assert_eq!(asg.get("a"), Some(&BigUint::from(1u32)));
        assert_eq!(asg.get("b"), Some(&BigUint::from(1u32)));
        assert_eq!(color, 0);
    }

    #[test]
    fn witness_on_parity_coloring() {
        // even -> 0, odd -> 1
        let parity = Coloring::new(2, (1..=12).map(|v| (v % 2) as Color).collect()).unwrap();
        let (asg, color) = find_witness(&parity, &quad()).unwrap().unwrap();
        assert_eq!(asg.get("a"), Some(&BigUint::from(2u32)));
        assert_eq!(asg.get("b"), Some(&BigUint::from(2u32)));
        assert_eq!(color, 0);
    }

    #[test]
    fn witness_absent_on_avoiding_coloring() {
        let c = Coloring::new(2, vec![0, 1]).unwrap();
        assert_eq!(find_witness(&c, &schur()).unwrap(), None);
    }

    #[test]
    fn verification_examples() {
        let good = Coloring::new(2, vec![0, 1, 1, 0]).unwrap();
        assert!(verify_avoidance(&good, &schur()).unwrap());
        let bad = Coloring::new(1, vec![0; 5]).unwrap();
        assert!(!verify_avoidance(&bad, &schur()).unwrap());
        // no instances in range: vacuously avoiding
        let tiny = Coloring::new(1, vec![0]).unwrap();
        assert!(verify_avoidance(&tiny, &schur()).unwrap());
    }

    #[test]
    fn distinct_flag_drops_degenerate_instances() {
        let mut p = quad();
        p.set_distinct_values(true);
        let table = enumerate_instances(&p, 2).unwrap();
        // the only assignment (a=1, b=1) collides on a=b=ab
        assert!(table.instances().is_empty());
    }

    #[test]
    fn search_is_deterministic() {
        let a = find_avoiding(&schur(), 3, 13, 1 << 24).unwrap();
        let b = find_avoiding(&schur(), 3, 13, 1 << 24).unwrap();
        assert_eq!(a, b);
    }
}
