//! Finite-sum (IP) combinatorics over arbitrary-precision integers.
//!
//! A [`GeneratingSequence`] `⟨x_1, ..., x_R⟩` spans its [`FiniteSumSet`]:
//! all sums over nonempty index subsets of `{1..R}`, each value carrying
//! one witnessing subset. On top of that sit the set operations used by
//! the descent construction — shift-intersection `{n : n ∈ A, n+y ∈ A}`,
//! dilation preimage `{n : ny ∈ A}` — together with divisible-sum
//! extraction and the search for a full FS structure inside an arbitrary
//! finite set.
//!
//! All arithmetic here is exact big-integer arithmetic: descent witnesses
//! multiply chains of generators and outgrow fixed width quickly.

use crate::NodeBudget;
use num_bigint::BigUint;
use num_traits::Zero;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Default cap on sequence length for full subset-sum enumeration.
pub const DEFAULT_MAX_FS_LEN: usize = 30;

/// Guard bounds for [`minimal_ipr_for_divisibility`].
pub const MAX_DIVISIBILITY_Y: u64 = 8;
pub const MAX_DIVISIBILITY_BOUND: u64 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsError {
    #[error("generating sequence must be nonempty")]
    EmptySequence,
    #[error("generating sequence entries must be ≥ 1")]
    ZeroEntry,
    #[error("sequence length {len} exceeds the enumeration guard {limit}")]
    LengthGuard { len: usize, limit: usize },
    #[error("sequence must have length ≥ 2")]
    TooShort,
    #[error("set elements must be ≥ 1")]
    ZeroElement,
    #[error(
        "exhaustive guard exceeded: need y ≤ {MAX_DIVISIBILITY_Y} and \
         value bound ≤ {MAX_DIVISIBILITY_BOUND}, got y = {y}, bound = {bound}"
    )]
    DivisibilityGuard { y: u64, bound: u64 },
}

/// A finite sequence `⟨x_1, ..., x_R⟩` of positive integers, `R ≥ 1`.
/// Entries may repeat and need not be sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSequence {
    xs: Vec<BigUint>,
}

impl GeneratingSequence {
    pub fn new(xs: Vec<BigUint>) -> Result<Self, FsError> {
        if xs.is_empty() {
            return Err(FsError::EmptySequence);
        }
        if xs.iter().any(Zero::is_zero) {
            return Err(FsError::ZeroEntry);
        }
        Ok(GeneratingSequence { xs })
    }

    pub fn from_u64s(xs: &[u64]) -> Result<Self, FsError> {
        Self::new(xs.iter().map(|&x| BigUint::from(x)).collect())
    }

    pub fn xs(&self) -> &[BigUint] {
        &self.xs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // new() rejects empty sequences
    }

    /// The first generator `x_1`.
    pub fn head(&self) -> &BigUint {
        &self.xs[0]
    }
}

/// The set of nonempty-subset sums of a generating sequence.
///
/// `witness` maps each value to one index subset achieving it (1-based,
/// sorted); when several subsets give the same sum, the one whose bitmask
/// is numerically smallest wins, which makes outputs reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSumSet {
    source: GeneratingSequence,
    values: BTreeSet<BigUint>,
    witness: BTreeMap<BigUint, Vec<u32>>,
}

impl FiniteSumSet {
    pub fn source(&self) -> &GeneratingSequence {
        &self.source
    }

    pub fn values(&self) -> &BTreeSet<BigUint> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, value: &BigUint) -> bool {
        self.values.contains(value)
    }

    pub fn min(&self) -> &BigUint {
        self.values.iter().next().expect("nonempty by construction")
    }

    pub fn witness_for(&self, value: &BigUint) -> Option<&[u32]> {
        self.witness.get(value).map(Vec::as_slice)
    }

    pub fn witnesses(&self) -> impl Iterator<Item = (&BigUint, &[u32])> {
        self.witness.iter().map(|(v, w)| (v, w.as_slice()))
    }

    /// Copies the value set into an [`IntSet`].
    pub fn to_int_set(&self) -> IntSet {
        IntSet(self.values.clone())
    }

    /// `{"xs": [...], "values": [...], "witness": {value: [indices]}}` with
    /// big integers rendered as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let xs: Vec<serde_json::Value> = self
            .source
            .xs()
            .iter()
            .map(|x| serde_json::Value::String(x.to_string()))
            .collect();
        let values: Vec<serde_json::Value> = self
            .values
            .iter()
            .map(|v| serde_json::Value::String(v.to_string()))
            .collect();
        let witness: serde_json::Map<String, serde_json::Value> = self
            .witness
            .iter()
            .map(|(v, idxs)| {
                (
                    v.to_string(),
                    serde_json::Value::Array(
                        idxs.iter().map(|&i| serde_json::Value::from(i)).collect(),
                    ),
                )
            })
            .collect();
        serde_json::json!({ "xs": xs, "values": values, "witness": witness })
    }
}

/// A finite set of positive integers, sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntSet(BTreeSet<BigUint>);

impl IntSet {
    pub fn new(values: impl IntoIterator<Item = BigUint>) -> Result<Self, FsError> {
        let set: BTreeSet<BigUint> = values.into_iter().collect();
        if set.iter().any(Zero::is_zero) {
            return Err(FsError::ZeroElement);
        }
        Ok(IntSet(set))
    }

    pub fn from_u64s(values: &[u64]) -> Result<Self, FsError> {
        Self::new(values.iter().map(|&v| BigUint::from(v)))
    }

    pub fn contains(&self, value: &BigUint) -> bool {
        self.0.contains(value)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BigUint> {
        self.0.iter()
    }

    pub fn min(&self) -> Option<&BigUint> {
        self.0.iter().next()
    }

    /// `{n : n ∈ self and n + y ∈ self}`.
    pub fn shift_intersect(&self, y: &BigUint) -> IntSet {
        assert!(!y.is_zero(), "shift must be positive");
        IntSet(
            self.0
                .iter()
                .filter(|n| self.0.contains(&(*n + y)))
                .cloned()
                .collect(),
        )
    }

    /// `{n ≥ 1 : n·y ∈ self}`, computed by dividing the multiples of `y`.
    pub fn dilate_preimage(&self, y: &BigUint) -> IntSet {
        assert!(!y.is_zero(), "dilation factor must be positive");
        IntSet(
            self.0
                .iter()
                .filter(|n| (*n % y).is_zero())
                .map(|n| n / y)
                .collect(),
        )
    }
}

impl FromIterator<BigUint> for IntSet {
    /// Convenience for internal use; zero elements are a caller bug.
    fn from_iter<T: IntoIterator<Item = BigUint>>(iter: T) -> Self {
        IntSet::new(iter).expect("IntSet elements must be ≥ 1")
    }
}

/// Enumerates all `2^R − 1` nonempty-subset sums of `g`, collapsed into a
/// set, each value keeping its first witness in bitmask order.
///
/// Guarded at [`DEFAULT_MAX_FS_LEN`]; use [`finite_sums_with_limit`] to
/// override.
pub fn finite_sums(g: &GeneratingSequence) -> Result<FiniteSumSet, FsError> {
    finite_sums_with_limit(g, DEFAULT_MAX_FS_LEN)
}

pub fn finite_sums_with_limit(
    g: &GeneratingSequence,
    max_len: usize,
) -> Result<FiniteSumSet, FsError> {
    if g.len() > max_len {
        return Err(FsError::LengthGuard {
            len: g.len(),
            limit: max_len,
        });
    }
    let mut values = BTreeSet::new();
    let mut witness: BTreeMap<BigUint, Vec<u32>> = BTreeMap::new();
    visit_subset_sums(g.xs(), &mut |mask, sum| {
        if mask == 0 {
            return;
        }
        if values.insert(sum.clone()) {
            witness.insert(sum.clone(), mask_to_indices(mask));
        }
    });
    Ok(FiniteSumSet {
        source: g.clone(),
        values,
        witness,
    })
}

/// Visits every subset bitmask of `xs` (including the empty one) in
/// ascending numeric order, where bit `i` selects `x_{i+1}`.
fn visit_subset_sums<F: FnMut(u32, &BigUint)>(xs: &[BigUint], f: &mut F) {
    fn go<F: FnMut(u32, &BigUint)>(xs: &[BigUint], level: usize, mask: u32, sum: BigUint, f: &mut F) {
        if level == 0 {
            f(mask, &sum);
            return;
        }
        let bit = level - 1;
        go(xs, bit, mask, sum.clone(), f);
        go(xs, bit, mask | (1 << bit), sum + &xs[bit], f);
    }
    go(xs, xs.len(), 0, BigUint::zero(), f);
}

fn mask_to_indices(mask: u32) -> Vec<u32> {
    (0..32)
        .filter(|bit| mask & (1 << bit) != 0)
        .map(|bit| bit + 1)
        .collect()
}

/// Split certificate: the head `y = x_1`, the tail sequence, and the
/// verified fact that every tail sum survives shifting by `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma3Split {
    pub y: BigUint,
    pub tail: GeneratingSequence,
    pub certificate: FiniteSumSet,
}

/// Splits off `y = x_1` and certifies
/// `FS(⟨x_2, ..., x_R⟩) ⊆ (−y + FS(g)) ∩ FS(g)`:
/// adding `y` to a tail sum just adjoins index 1 to its subset. The
/// inclusion is re-checked set-theoretically and a violation panics,
/// since it would falsify the arithmetic this crate is built on.
pub fn lemma3_split(g: &GeneratingSequence) -> Result<Lemma3Split, FsError> {
    if g.len() < 2 {
        return Err(FsError::TooShort);
    }
    let y = g.head().clone();
    let tail = GeneratingSequence::new(g.xs()[1..].to_vec())?;
    let certificate = finite_sums(&tail)?;
    let full = finite_sums(g)?;
    let surviving = full.to_int_set().shift_intersect(&y);
    for value in certificate.values() {
        assert!(
            surviving.contains(value),
            "tail sum {value} missing from the shift-intersection by {y}"
        );
    }
    Ok(Lemma3Split {
        y,
        tail,
        certificate,
    })
}

/// A subset of indices whose sum is divisible by the requested modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibleSum {
    /// 1-based, sorted.
    pub indices: Vec<u32>,
    pub value: BigUint,
}

/// Finds an index subset of `g` whose sum is divisible by `y`.
///
/// With `R ≥ y` the result always exists and is a consecutive block
/// `{i+1, ..., j}`: among the `R + 1` prefix sums, two must agree mod `y`.
/// With `R < y` all `2^R − 1` subsets are searched in bitmask order and
/// the result may be `None`.
pub fn find_divisible(g: &GeneratingSequence, y: &BigUint) -> Option<DivisibleSum> {
    assert!(!y.is_zero(), "modulus must be positive");
    let r_len = BigUint::from(g.len());
    if r_len >= *y {
        // residue -> index of the earliest prefix sum with that residue
        let mut seen: BTreeMap<BigUint, usize> = BTreeMap::new();
        seen.insert(BigUint::zero(), 0);
        let mut prefix = BigUint::zero();
        let mut prefixes = vec![BigUint::zero()];
        for (j, x) in g.xs().iter().enumerate() {
            prefix += x;
            prefixes.push(prefix.clone());
            let residue = &prefix % y;
            if let Some(&i) = seen.get(&residue) {
                let value = &prefixes[j + 1] - &prefixes[i];
                return Some(DivisibleSum {
                    indices: (i as u32 + 1..=j as u32 + 1).collect(),
                    value,
                });
            }
            seen.insert(residue, j + 1);
        }
        unreachable!("pigeonhole guarantees a repeated prefix residue when R ≥ y");
    }
    let mut found = None;
    visit_subset_sums(g.xs(), &mut |mask, sum| {
        if mask != 0 && found.is_none() && (sum % y).is_zero() {
            found = Some(DivisibleSum {
                indices: mask_to_indices(mask),
                value: sum.clone(),
            });
        }
    });
    found
}

/// The minimal `R` such that every sequence of length `R` with entries in
/// `[1, value_bound]` has a finite sum divisible by `y`, determined by
/// exhaustive search over all `value_bound^R` sequences for each candidate
/// `R`. The answer never exceeds `y` thanks to the prefix pigeonhole.
pub fn minimal_ipr_for_divisibility(y: u64, value_bound: u64) -> Result<u64, FsError> {
    if y == 0 || value_bound == 0 || y > MAX_DIVISIBILITY_Y || value_bound > MAX_DIVISIBILITY_BOUND
    {
        return Err(FsError::DivisibilityGuard {
            y,
            bound: value_bound,
        });
    }
    let modulus = BigUint::from(y);
    for r_len in 1..=y {
        if all_sequences_have_divisible_sum(&modulus, value_bound, r_len as usize) {
            return Ok(r_len);
        }
    }
    unreachable!("length y always suffices by the prefix pigeonhole")
}

fn all_sequences_have_divisible_sum(y: &BigUint, bound: u64, r_len: usize) -> bool {
    let mut entries = vec![1u64; r_len];
    loop {
        let seq = GeneratingSequence::from_u64s(&entries).expect("entries start at 1");
        if find_divisible(&seq, y).is_none() {
            return false;
        }
        // odometer over [1, bound]^r_len
        let mut pos = r_len;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            if entries[pos] < bound {
                entries[pos] += 1;
                for e in &mut entries[pos + 1..] {
                    *e = 1;
                }
                break;
            }
        }
    }
}

/// Outcome of [`extract_fs_subsequence`]: `NotFound` is definitive (the
/// search space was exhausted), `BudgetExhausted` is not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtractOutcome {
    Found(GeneratingSequence),
    NotFound,
    BudgetExhausted,
}

/// Searches `s` for a strictly increasing sequence `⟨x_1 < ... < x_L⟩`
/// whose `2^L − 1` subset sums are pairwise distinct and all lie in `s`.
///
/// Candidates are explored in increasing numeric order with backtracking,
/// so the first solution in lexicographic order is returned; requiring
/// distinct sums is what makes the result a full FS structure rather than
/// a collapsed one (in `{1..7}` the first length-3 answer is `⟨1,2,4⟩`,
/// not `⟨1,2,3⟩` whose sums collide). One budget node is charged per
/// candidate test.
pub fn extract_fs_subsequence(
    s: &IntSet,
    length: usize,
    budget: &mut NodeBudget,
) -> ExtractOutcome {
    assert!(length >= 1, "requested length must be positive");
    let elems: Vec<&BigUint> = s.iter().collect();
    let mut chosen: Vec<BigUint> = Vec::with_capacity(length);
    let mut sums: BTreeSet<BigUint> = BTreeSet::new();
    let outcome = extend(s, &elems, length, 0, &mut chosen, &mut sums, budget);
    if let ExtractOutcome::Found(g) = &outcome {
        let fs = finite_sums(g).expect("extracted length is within the guard");
        for value in fs.values() {
            assert!(s.contains(value), "extracted sum {value} escapes the set");
        }
    }
    outcome
}

fn extend(
    target: &IntSet,
    elems: &[&BigUint],
    length: usize,
    start: usize,
    chosen: &mut Vec<BigUint>,
    sums: &mut BTreeSet<BigUint>,
    budget: &mut NodeBudget,
) -> ExtractOutcome {
    if chosen.len() == length {
        return ExtractOutcome::Found(
            GeneratingSequence::new(chosen.clone()).expect("chosen elements are ≥ 1"),
        );
    }
    for idx in start..elems.len() {
        if !budget.try_spend(1) {
            return ExtractOutcome::BudgetExhausted;
        }
        let candidate = elems[idx];
        // New sums are the candidate plus each existing sum (and the
        // candidate alone); they are pairwise distinct automatically, so
        // only membership and freshness need checking.
        let mut new_sums = Vec::with_capacity(sums.len() + 1);
        let mut ok = target.contains(candidate) && !sums.contains(candidate);
        if ok {
            new_sums.push(candidate.clone());
            for sum in sums.iter() {
                let extended = sum + candidate;
                if !target.contains(&extended) || sums.contains(&extended) {
                    ok = false;
                    break;
                }
                new_sums.push(extended);
            }
        }
        if !ok {
            continue;
        }
        for sum in &new_sums {
            sums.insert(sum.clone());
        }
        chosen.push(candidate.clone());
        match extend(target, elems, length, idx + 1, chosen, sums, budget) {
            ExtractOutcome::NotFound => {
                chosen.pop();
                for sum in &new_sums {
                    sums.remove(sum);
                }
            }
            other => return other,
        }
    }
    ExtractOutcome::NotFound
}
