//! Stage-by-stage descent simulation.
//!
//! Given an intensional coloring rule and a seed generating sequence, the
//! simulator realizes the iterated construction that produces a
//! monochromatic `{a, b, ab, (a+1)b}`:
//!
//! - stage 0 finds a color class holding a full FS structure inside the
//!   seed's finite-sum set;
//! - stage `n` takes `y_n` as the first generator of the previous stage's
//!   sequence, keeps the tail sums that survive shifting by `y_n`
//!   (every tail sum does — adding `y_n` adjoins index 1), groups tail
//!   entries into disjoint blocks with sums divisible by `y_n`, divides
//!   out `y_n`, and hunts for a full FS structure of the requested length
//!   inside one color class of the resulting pool;
//! - the first repeated stage color `i_j = i_n` closes the loop: with
//!   `x` the least element of stage `n`'s sums, `a = x` and
//!   `b = y_n ⋯ y_{j+1}` give four values `a, b, ab, (a+1)b` whose stage
//!   memberships and colors are all re-verified from scratch.
//!
//! Finite truncation can run out of room where the corresponding infinite
//! argument cannot, so structured failure (which stage, why) is a
//! first-class outcome.

use crate::coloring::{Color, Coloring, ColoringError};
use crate::fs::{
    extract_fs_subsequence, find_divisible, finite_sums, lemma3_split, ExtractOutcome, FsError,
    GeneratingSequence, IntSet,
};
use crate::NodeBudget;
use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// An intensional `r`-coloring of the positive integers, evaluable at any
/// value up to its cap (residue and multiplicative interval rules have
/// none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringRule {
    num_colors: Color,
    kind: RuleKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RuleKind {
    /// Color of `x` is `map[x mod modulus]`.
    Residue { modulus: BigUint, map: Vec<Color> },
    /// Piecewise-constant blocks `[breaks[i], breaks[i+1])`; the block
    /// layout either repeats self-similarly at scale `factor` or is
    /// explicit up to `cap`.
    Interval {
        breaks: Vec<BigUint>,
        colors: Vec<Color>,
        extent: IntervalExtent,
    },
    Explicit(Coloring),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntervalExtent {
    /// Blocks cover `[1, factor)` and repeat at `factor^t` for all `t`.
    Multiplicative(BigUint),
    /// Blocks are explicit; values beyond `cap` are out of range.
    Capped(BigUint),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("value {value} exceeds the rule's cap {cap}")]
    CapExceeded { value: BigUint, cap: BigUint },
    #[error("invalid rule: {0}")]
    Invalid(String),
    #[error("rule file: {0}")]
    Io(String),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

impl ColoringRule {
    /// `map[residue]` gives the color; `map.len()` is the modulus.
    pub fn residue(map: Vec<Color>) -> Result<Self, RuleError> {
        if map.is_empty() {
            return Err(RuleError::Invalid("residue map must be nonempty".into()));
        }
        let num_colors = map.iter().max().copied().unwrap_or(0) + 1;
        Ok(ColoringRule {
            num_colors,
            kind: RuleKind::Residue {
                modulus: BigUint::from(map.len()),
                map,
            },
        })
    }

    pub fn interval(
        breaks: Vec<BigUint>,
        colors: Vec<Color>,
        extent: IntervalExtent,
    ) -> Result<Self, RuleError> {
        if breaks.is_empty() || breaks[0] != BigUint::one() {
            return Err(RuleError::Invalid(
                "interval breakpoints must start at 1".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RuleError::Invalid(
                "interval breakpoints must be strictly increasing".into(),
            ));
        }
        if colors.len() != breaks.len() {
            return Err(RuleError::Invalid(
                "one color per interval block is required".into(),
            ));
        }
        let last = breaks.last().expect("nonempty");
        match &extent {
            IntervalExtent::Multiplicative(factor) if factor <= last => {
                return Err(RuleError::Invalid(
                    "repeat factor must exceed the last breakpoint".into(),
                ));
            }
            IntervalExtent::Capped(cap) if cap < last => {
                return Err(RuleError::Invalid(
                    "cap must reach the last breakpoint".into(),
                ));
            }
            _ => {}
        }
        let num_colors = colors.iter().max().copied().unwrap_or(0) + 1;
        Ok(ColoringRule {
            num_colors,
            kind: RuleKind::Interval {
                breaks,
                colors,
                extent,
            },
        })
    }

    pub fn explicit(coloring: Coloring) -> Self {
        ColoringRule {
            num_colors: coloring.num_colors(),
            kind: RuleKind::Explicit(coloring),
        }
    }

    pub fn num_colors(&self) -> Color {
        self.num_colors
    }

    /// Largest representable value, when the rule has one.
    pub fn cap(&self) -> Option<BigUint> {
        match &self.kind {
            RuleKind::Residue { .. } => None,
            RuleKind::Interval { extent, .. } => match extent {
                IntervalExtent::Multiplicative(_) => None,
                IntervalExtent::Capped(cap) => Some(cap.clone()),
            },
            RuleKind::Explicit(c) => Some(BigUint::from(c.n())),
        }
    }

    pub fn color_of(&self, x: &BigUint) -> Result<Color, RuleError> {
        assert!(!num_traits::Zero::is_zero(x), "rules color values ≥ 1");
        match &self.kind {
            RuleKind::Residue { modulus, map } => {
                let residue = x % modulus;
                let idx = usize::try_from(&residue).expect("residue < map length");
                Ok(map[idx])
            }
            RuleKind::Interval {
                breaks,
                colors,
                extent,
            } => {
                let q = match extent {
                    IntervalExtent::Multiplicative(factor) => {
                        let mut q = x.clone();
                        while q >= *factor {
                            q /= factor;
                        }
                        q
                    }
                    IntervalExtent::Capped(cap) => {
                        if x > cap {
                            return Err(RuleError::CapExceeded {
                                value: x.clone(),
                                cap: cap.clone(),
                            });
                        }
                        x.clone()
                    }
                };
                let block = breaks.iter().rposition(|b| *b <= q).expect("q ≥ 1 = b_0");
                Ok(colors[block])
            }
            RuleKind::Explicit(c) => {
                let n = BigUint::from(c.n());
                if *x > n {
                    return Err(RuleError::CapExceeded {
                        value: x.clone(),
                        cap: n,
                    });
                }
                let v = u64::try_from(x).expect("x ≤ n ≤ u64");
                Ok(c.color_of(v)?)
            }
        }
    }

    /// Parses the JSON rule format:
    ///
    /// ```json
    /// {"kind": "residue", "modulus": 2, "map": [0, 1]}
    /// {"kind": "interval", "breakpoints": [1, 2], "colors": [0, 1], "factor": 4}
    /// {"kind": "interval", "breakpoints": [1, 5], "colors": [0, 1], "cap": 100}
    /// {"kind": "explicit", "file": "coloring.txt"}
    /// ```
    ///
    /// Numbers may be JSON integers or decimal strings. A relative
    /// `"file"` path is resolved against `base_dir`.
    pub fn from_json(
        value: &serde_json::Value,
        base_dir: Option<&Path>,
    ) -> Result<Self, RuleError> {
        let kind = value["kind"]
            .as_str()
            .ok_or_else(|| RuleError::Invalid("missing \"kind\"".into()))?;
        match kind {
            "residue" => {
                let modulus = json_u64(&value["modulus"], "modulus")?;
                let map = json_color_array(&value["map"], "map")?;
                if map.len() as u64 != modulus {
                    return Err(RuleError::Invalid(format!(
                        "map has {} entries but modulus is {modulus}",
                        map.len()
                    )));
                }
                ColoringRule::residue(map)
            }
            "interval" => {
                let breaks = json_biguint_array(&value["breakpoints"], "breakpoints")?;
                let colors = json_color_array(&value["colors"], "colors")?;
                let extent = match (value.get("factor"), value.get("cap")) {
                    (Some(f), None) => IntervalExtent::Multiplicative(json_biguint(f, "factor")?),
                    (None, Some(c)) => IntervalExtent::Capped(json_biguint(c, "cap")?),
                    _ => {
                        return Err(RuleError::Invalid(
                            "interval rule needs exactly one of \"factor\" or \"cap\"".into(),
                        ))
                    }
                };
                ColoringRule::interval(breaks, colors, extent)
            }
            "explicit" => {
                let file = value["file"]
                    .as_str()
                    .ok_or_else(|| RuleError::Invalid("explicit rule needs \"file\"".into()))?;
                let mut path = std::path::PathBuf::from(file);
                if path.is_relative() {
                    if let Some(dir) = base_dir {
                        path = dir.join(path);
                    }
                }
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| RuleError::Io(format!("{}: {e}", path.display())))?;
                Ok(ColoringRule::explicit(Coloring::parse(&text)?))
            }
            other => Err(RuleError::Invalid(format!("unknown kind \"{other}\""))),
        }
    }

    pub fn from_json_str(text: &str, base_dir: Option<&Path>) -> Result<Self, RuleError> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| RuleError::Invalid(format!("malformed JSON: {e}")))?;
        Self::from_json(&value, base_dir)
    }
}

fn json_u64(v: &serde_json::Value, what: &str) -> Result<u64, RuleError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_u64()
            .ok_or_else(|| RuleError::Invalid(format!("{what} must be a nonnegative integer"))),
        serde_json::Value::String(s) => s
            .parse()
            .map_err(|_| RuleError::Invalid(format!("{what}: bad integer `{s}`"))),
        _ => Err(RuleError::Invalid(format!("{what} must be an integer"))),
    }
}

fn json_biguint(v: &serde_json::Value, what: &str) -> Result<BigUint, RuleError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| RuleError::Invalid(format!("{what} must be a nonnegative integer"))),
        serde_json::Value::String(s) => s
            .parse()
            .map_err(|_| RuleError::Invalid(format!("{what}: bad integer `{s}`"))),
        _ => Err(RuleError::Invalid(format!(
            "{what} must be an integer or decimal string"
        ))),
    }
}

fn json_biguint_array(v: &serde_json::Value, what: &str) -> Result<Vec<BigUint>, RuleError> {
    v.as_array()
        .ok_or_else(|| RuleError::Invalid(format!("{what} must be an array")))?
        .iter()
        .map(|e| json_biguint(e, what))
        .collect()
}

fn json_color_array(v: &serde_json::Value, what: &str) -> Result<Vec<Color>, RuleError> {
    v.as_array()
        .ok_or_else(|| RuleError::Invalid(format!("{what} must be an array")))?
        .iter()
        .map(|e| {
            json_u64(e, what).and_then(|c| {
                Color::try_from(c)
                    .map_err(|_| RuleError::Invalid(format!("{what}: color {c} too large")))
            })
        })
        .collect()
}

/// Materializes the rule on `[1, n]`.
pub fn induced_coloring(rule: &ColoringRule, n: u64) -> Result<Coloring, RuleError> {
    let mut colors = Vec::with_capacity(n as usize);
    for v in 1..=n {
        colors.push(rule.color_of(&BigUint::from(v))?);
    }
    Ok(Coloring::new(rule.num_colors(), colors)?)
}

/// One stage of the descent. `y` is `None` exactly at stage 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    pub index: usize,
    pub y: Option<BigUint>,
    pub color: Color,
    pub sequence: GeneratingSequence,
    pub fs_size: usize,
}

/// The repeated-color indices `j < n` with shared color `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pigeonhole {
    pub j: usize,
    pub n: usize,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub a: BigUint,
    pub b: BigUint,
    /// The collapsed set `{a, b, ab, (a+1)b}`, sorted.
    pub values: Vec<BigUint>,
    pub color: Color,
}

/// Full record of a simulation run. `verified` means every stage
/// membership in the witness chain and all four value colors were
/// re-checked successfully.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub stages: Vec<StageRecord>,
    pub pigeonhole: Pigeonhole,
    pub witness: Witness,
    pub verified: bool,
}

impl ProofTrace {
    /// Big integers serialize as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let stages: Vec<serde_json::Value> = self
            .stages
            .iter()
            .map(|s| {
                serde_json::json!({
                    "n": s.index,
                    "y": s.y.as_ref().map(|y| y.to_string()),
                    "color": s.color,
                    "sequence": s.sequence.xs().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "fs_size": s.fs_size,
                })
            })
            .collect();
        serde_json::json!({
            "stages": stages,
            "pigeonhole": {
                "j": self.pigeonhole.j,
                "n": self.pigeonhole.n,
                "k": self.pigeonhole.color,
            },
            "witness": {
                "a": self.witness.a.to_string(),
                "b": self.witness.b.to_string(),
                "values": self.witness.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "color": self.witness.color,
            },
            "verified": self.verified,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulateError {
    #[error("stage lengths must have exactly r + 1 = {expected} entries, got {got}")]
    WrongStageCount { expected: usize, got: usize },
    #[error("stage lengths must all be ≥ 1")]
    ZeroStageLength,
    #[error("stage {stage}: no color class contains a full FS structure of length {required} ({detail})")]
    NoFsStructure {
        stage: usize,
        required: usize,
        detail: String,
    },
    #[error("stage {stage}: node budget exhausted")]
    BudgetExhausted { stage: usize },
    #[error("stage {stage}: {source}")]
    Rule { stage: usize, source: RuleError },
    #[error(transparent)]
    Fs(#[from] FsError),
}

/// Runs the descent under `rule` starting from `seed`, demanding an FS
/// structure of length `stage_lengths[n]` at stage `n`. `stage_lengths`
/// must have `r + 1` entries: with `r` colors, a repeat is certain within
/// `r + 1` stages. The budget is shared by all structure searches.
pub fn simulate(
    rule: &ColoringRule,
    seed: &GeneratingSequence,
    stage_lengths: &[usize],
    budget: u64,
) -> Result<ProofTrace, SimulateError> {
    let r = rule.num_colors() as usize;
    if stage_lengths.len() != r + 1 {
        return Err(SimulateError::WrongStageCount {
            expected: r + 1,
            got: stage_lengths.len(),
        });
    }
    if stage_lengths.contains(&0) {
        return Err(SimulateError::ZeroStageLength);
    }
    let mut budget = NodeBudget::new(budget);

    let seed_fs = finite_sums(seed)?;
    let classes = split_by_color(rule, seed_fs.to_int_set(), 0)?;
    let (color0, g0) = extract_from_classes(&classes, stage_lengths[0], &mut budget, 0)?;
    let fs0 = finite_sums(&g0)?;
    let mut stages = vec![StageRecord {
        index: 0,
        y: None,
        color: color0,
        sequence: g0,
        fs_size: fs0.len(),
    }];
    let mut stage_sums = vec![fs0];
    let mut first_stage_of_color: BTreeMap<Color, usize> = BTreeMap::new();
    first_stage_of_color.insert(color0, 0);

    for stage in 1..=r {
        let required = stage_lengths[stage];
        let g_prev = &stages[stage - 1].sequence;
        if g_prev.len() < 2 {
            return Err(SimulateError::NoFsStructure {
                stage,
                required,
                detail: "previous stage sequence has a single generator, nothing to split".into(),
            });
        }
        let split = lemma3_split(g_prev)?;
        let y = split.y;

        // Disjoint blocks of tail entries with sums divisible by y; their
        // subset sums stay inside FS(tail) and stay divisible.
        let blocks = divisible_blocks(&split.tail, &y);
        if blocks.is_empty() {
            return Err(SimulateError::NoFsStructure {
                stage,
                required,
                detail: format!("no tail block has a sum divisible by y = {y}"),
            });
        }
        let pool_seq = GeneratingSequence::new(blocks.iter().map(|b| b / &y).collect())?;
        let pool = finite_sums(&pool_seq)?;

        // Every pool element m must satisfy m·y ∈ D_{n−1} and
        // m·y + y ∈ D_{n−1}; this is the membership the witness chain
        // relies on, so a violation is a construction bug.
        let prev = &stage_sums[stage - 1];
        for m in pool.values() {
            let my = m * &y;
            assert!(
                prev.contains(&my) && prev.contains(&(&my + &y)),
                "pool element {m} fails the stage-{stage} membership predicate"
            );
        }

        let classes = split_by_color(rule, pool.to_int_set(), stage)?;
        let (color, g) = extract_from_classes(&classes, required, &mut budget, stage)?;
        let fs = finite_sums(&g)?;
        stages.push(StageRecord {
            index: stage,
            y: Some(y),
            color,
            sequence: g,
            fs_size: fs.len(),
        });
        stage_sums.push(fs);

        if let Some(&j) = first_stage_of_color.get(&color) {
            return Ok(assemble_trace(rule, stages, &stage_sums, j, stage));
        }
        first_stage_of_color.insert(color, stage);
    }
    unreachable!("r + 1 stages over r colors must repeat a color")
}

fn split_by_color(
    rule: &ColoringRule,
    values: IntSet,
    stage: usize,
) -> Result<Vec<IntSet>, SimulateError> {
    let mut classes: Vec<Vec<BigUint>> = vec![Vec::new(); rule.num_colors() as usize];
    for v in values.iter() {
        let color = rule
            .color_of(v)
            .map_err(|source| SimulateError::Rule { stage, source })?;
        classes[color as usize].push(v.clone());
    }
    Ok(classes
        .into_iter()
        .map(|vs| IntSet::new(vs).expect("values come from an IntSet"))
        .collect())
}

/// Tries each color class in ascending order and returns the first full
/// FS structure of the requested length.
fn extract_from_classes(
    classes: &[IntSet],
    length: usize,
    budget: &mut NodeBudget,
    stage: usize,
) -> Result<(Color, GeneratingSequence), SimulateError> {
    for (k, class) in classes.iter().enumerate() {
        match extract_fs_subsequence(class, length, budget) {
            ExtractOutcome::Found(g) => return Ok((k as Color, g)),
            ExtractOutcome::NotFound => continue,
            ExtractOutcome::BudgetExhausted => {
                return Err(SimulateError::BudgetExhausted { stage })
            }
        }
    }
    let sizes: Vec<usize> = classes.iter().map(IntSet::len).collect();
    Err(SimulateError::NoFsStructure {
        stage,
        required: length,
        detail: format!("class sizes {sizes:?}"),
    })
}

/// Greedily cuts the tail into disjoint index blocks whose sums are
/// divisible by `y`, restarting after each find.
fn divisible_blocks(tail: &GeneratingSequence, y: &BigUint) -> Vec<BigUint> {
    let mut sums = Vec::new();
    let mut rest: &[BigUint] = tail.xs();
    while !rest.is_empty() {
        let seq = GeneratingSequence::new(rest.to_vec()).expect("nonempty remainder");
        match find_divisible(&seq, y) {
            Some(found) => {
                let last = *found.indices.last().expect("nonempty subset") as usize;
                sums.push(found.value);
                rest = &rest[last..];
            }
            None => break,
        }
    }
    sums
}

fn assemble_trace(
    rule: &ColoringRule,
    stages: Vec<StageRecord>,
    stage_sums: &[crate::fs::FiniteSumSet],
    j: usize,
    n: usize,
) -> ProofTrace {
    let k = stages[n].color;
    let x = stage_sums[n].min().clone();
    let mut b = BigUint::one();
    for stage in &stages[j + 1..=n] {
        b *= stage.y.as_ref().expect("stages ≥ 1 carry y");
    }
    let a = x.clone();
    let ab = &a * &b;
    let a1b = (&a + 1u32) * &b;
    let y_n = stages[n].y.clone().expect("n ≥ 1");

    let mut ok = true;
    // a·b: x descends from stage n to stage j
    ok &= chain_membership(&x, &stages, stage_sums, j, n);
    // b: y_n sits in stage n−1 and descends to stage j
    ok &= chain_membership(&y_n, &stages, stage_sums, j, n - 1);
    // (a+1)·b: x·y_n + y_n sits in stage n−1 and descends to stage j
    let shifted = &x * &y_n + &y_n;
    ok &= chain_membership(&shifted, &stages, stage_sums, j, n - 1);

    for value in [&a, &b, &ab, &a1b] {
        match rule.color_of(value) {
            Ok(color) => ok &= color == k,
            Err(_) => ok = false,
        }
    }

    let mut values = vec![a.clone(), b.clone(), ab, a1b];
    values.sort();
    values.dedup();

    ProofTrace {
        stages,
        pigeonhole: Pigeonhole { j, n, color: k },
        witness: Witness {
            a,
            b,
            values,
            color: k,
        },
        verified: ok,
    }
}

/// Checks `start ∈ FS(stage top)` and then, multiplying by `y_m` on the
/// way down, membership in every FS realization from `top − 1` to `j`.
fn chain_membership(
    start: &BigUint,
    stages: &[StageRecord],
    stage_sums: &[crate::fs::FiniteSumSet],
    j: usize,
    top: usize,
) -> bool {
    let mut ok = stage_sums[top].contains(start);
    let mut v = start.clone();
    for m in (j + 1..=top).rev() {
        v *= stages[m].y.as_ref().expect("stages ≥ 1 carry y");
        ok &= stage_sums[m - 1].contains(&v);
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity_rule() -> ColoringRule {
        // residue 0 (even) -> color 0, residue 1 (odd) -> color 1
        ColoringRule::residue(vec![0, 1]).unwrap()
    }

    fn seq(xs: &[u64]) -> GeneratingSequence {
        GeneratingSequence::from_u64s(xs).unwrap()
    }

    #[test]
    fn induced_parity_coloring() {
        let c = induced_coloring(&parity_rule(), 4).unwrap();
        assert_eq!(c.colors(), &[1, 0, 1, 0]);
    }

    #[test]
    fn induced_residue_mod_three() {
        let rule = ColoringRule::residue(vec![0, 1, 2]).unwrap();
        let c = induced_coloring(&rule, 3).unwrap();
        assert_eq!(c.colors(), &[1, 2, 0]);
    }

    #[test]
    fn explicit_rule_is_the_identity() {
        let base = Coloring::new(3, vec![2, 0, 1, 1]).unwrap();
        let rule = ColoringRule::explicit(base.clone());
        assert_eq!(induced_coloring(&rule, 4).unwrap(), base);
        assert!(matches!(
            induced_coloring(&rule, 5),
            Err(RuleError::CapExceeded { .. })
        ));
    }

    #[test]
    fn multiplicative_interval_rule() {
        // dyadic-style alternation: [1,2) -> 0, [2,4) -> 1, then repeat at 4^t
        let rule = ColoringRule::interval(
            vec![BigUint::one(), BigUint::from(2u32)],
            vec![0, 1],
            IntervalExtent::Multiplicative(BigUint::from(4u32)),
        )
        .unwrap();
        let expect: &[(u64, Color)] =
            &[(1, 0), (2, 1), (3, 1), (4, 0), (7, 0), (8, 1), (15, 1), (16, 0), (64, 0)];
        for &(x, c) in expect {
            assert_eq!(rule.color_of(&BigUint::from(x)).unwrap(), c, "x = {x}");
        }
        assert_eq!(rule.cap(), None);
    }

    #[test]
    fn capped_interval_rule() {
        let rule = ColoringRule::interval(
            vec![BigUint::one(), BigUint::from(5u32)],
            vec![0, 1],
            IntervalExtent::Capped(BigUint::from(10u32)),
        )
        .unwrap();
        assert_eq!(rule.color_of(&BigUint::from(4u32)).unwrap(), 0);
        assert_eq!(rule.color_of(&BigUint::from(5u32)).unwrap(), 1);
        assert!(rule.color_of(&BigUint::from(11u32)).is_err());
    }

    #[test]
    fn rule_json_round_trips() {
        let rule =
            ColoringRule::from_json_str(r#"{"kind":"residue","modulus":2,"map":[0,1]}"#, None)
                .unwrap();
        assert_eq!(rule, parity_rule());
        let interval = ColoringRule::from_json_str(
            r#"{"kind":"interval","breakpoints":[1,"2"],"colors":[0,1],"factor":"4"}"#,
            None,
        )
        .unwrap();
        assert_eq!(interval.num_colors(), 2);
        assert!(ColoringRule::from_json_str(r#"{"kind":"nope"}"#, None).is_err());
        assert!(ColoringRule::from_json_str(
            r#"{"kind":"residue","modulus":3,"map":[0,1]}"#,
            None
        )
        .is_err());
    }

    #[test]
    fn parity_descent_closes_at_stage_one() {
        let trace = simulate(&parity_rule(), &seq(&[2, 4, 8, 16, 32, 64]), &[4, 3, 2], 1 << 20)
            .unwrap();
        assert!(trace.verified);
        assert_eq!(trace.pigeonhole, Pigeonhole { j: 0, n: 1, color: 0 });
        assert_eq!(trace.stages[0].sequence, seq(&[2, 4, 8, 16]));
        assert_eq!(trace.witness.a, BigUint::from(2u32));
        assert_eq!(trace.witness.b, BigUint::from(2u32));
        // all witness values are even
        for v in &trace.witness.values {
            assert_eq!(v % BigUint::from(2u32), BigUint::from(0u32));
        }
    }

    #[test]
    fn single_color_rule_is_immediate() {
        let rule = ColoringRule::residue(vec![0]).unwrap();
        let trace = simulate(&rule, &seq(&[1, 2, 4]), &[2, 1], 1 << 20).unwrap();
        assert!(trace.verified);
        assert_eq!(trace.pigeonhole.j, 0);
        assert_eq!(trace.pigeonhole.n, 1);
    }

    #[test]
    fn stage_count_is_validated() {
        assert!(matches!(
            simulate(&parity_rule(), &seq(&[2, 4]), &[2, 1], 1 << 10),
            Err(SimulateError::WrongStageCount {
                expected: 3,
                got: 2
            })
        ));
        assert!(matches!(
            simulate(&parity_rule(), &seq(&[2, 4]), &[2, 0, 1], 1 << 10),
            Err(SimulateError::ZeroStageLength)
        ));
    }

    #[test]
    fn structure_failures_name_their_stage() {
        // FS({1,3,9}) = {1,3,4,9,10,12,13} has odd and even members but no
        // length-3 structure inside a parity class.
        let err = simulate(&parity_rule(), &seq(&[1, 3, 9]), &[3, 2, 1], 1 << 20).unwrap_err();
        match err {
            SimulateError::NoFsStructure { stage: 0, .. } => {}
            other => panic!("expected stage-0 structure failure, got {other:?}"),
        }
    }

    #[test]
    fn trace_json_shape() {
        let trace =
            simulate(&parity_rule(), &seq(&[2, 4, 8, 16, 32, 64]), &[4, 3, 2], 1 << 20).unwrap();
        let json = trace.to_json();
        assert_eq!(json["verified"], serde_json::json!(true));
        assert_eq!(json["stages"][0]["y"], serde_json::Value::Null);
        assert_eq!(json["stages"][1]["y"], serde_json::json!("2"));
        assert_eq!(json["witness"]["a"], serde_json::json!("2"));
        assert_eq!(json["pigeonhole"]["k"], serde_json::json!(0));
    }
}
