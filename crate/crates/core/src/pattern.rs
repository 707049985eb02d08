//! Arithmetic pattern DSL.
//!
//! A pattern is a comma-separated list of terms built from lowercase
//! variables, positive integer constants, `+` and `*`:
//!
//! ```text
//! pattern := term ("," term)+ | term
//! expr    := product ("+" product)*
//! product := atom ("*" atom)*
//! atom    := var | int | "(" expr ")"
//! var     := [a-z][a-z0-9]*
//! int     := [1-9][0-9]*
//! ```
//!
//! Everything ranges over the positive integers: constants start at 1,
//! variables are assigned values ≥ 1, and evaluation is exact
//! arbitrary-precision arithmetic, so every term value is again ≥ 1.

use num_bigint::BigUint;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Default cap on the node count of a single parsed term.
pub const MAX_TERM_NODES: usize = 64;

/// An arithmetic expression over variables and positive constants.
///
/// `Sum` and `Product` nodes always have at least two children; the parser
/// flattens unparenthesized chains, so `a+b+c` is a single three-child sum
/// while `(a+b)+c` nests.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Variable(String),
    Constant(u64),
    Sum(Vec<Term>),
    Product(Vec<Term>),
}

impl Term {
    pub fn node_count(&self) -> usize {
        match self {
            Term::Variable(_) | Term::Constant(_) => 1,
            Term::Sum(children) | Term::Product(children) => {
                1 + children.iter().map(Term::node_count).sum::<usize>()
            }
        }
    }

    /// Appends variables in first-occurrence order, skipping ones already
    /// present in `out`.
    pub fn collect_variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Variable(name) => {
                if !out.iter().any(|v| v == name) {
                    out.push(name.clone());
                }
            }
            Term::Constant(_) => {}
            Term::Sum(children) | Term::Product(children) => {
                for child in children {
                    child.collect_variables(out);
                }
            }
        }
    }

    /// Exact evaluation under `asg`; every variable of the term must be
    /// bound.
    pub fn eval(&self, asg: &Assignment) -> Result<BigUint, EvalError> {
        match self {
            Term::Variable(name) => asg
                .get(name)
                .cloned()
                .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
            Term::Constant(value) => Ok(BigUint::from(*value)),
            Term::Sum(children) => {
                let mut total = BigUint::from(0u32);
                for child in children {
                    total += child.eval(asg)?;
                }
                Ok(total)
            }
            Term::Product(children) => {
                let mut total = BigUint::from(1u32);
                for child in children {
                    total *= child.eval(asg)?;
                }
                Ok(total)
            }
        }
    }

    fn is_sum(&self) -> bool {
        matches!(self, Term::Sum(_))
    }

    fn is_composite(&self) -> bool {
        matches!(self, Term::Sum(_) | Term::Product(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(name) => write!(f, "{name}"),
            Term::Constant(value) => write!(f, "{value}"),
            Term::Sum(children) => {
                // A sum child inside a sum must keep its own parentheses,
                // otherwise reparsing would flatten it.
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    if child.is_sum() {
                        write!(f, "({child})")?;
                    } else {
                        write!(f, "{child}")?;
                    }
                }
                Ok(())
            }
            Term::Product(children) => {
                for (i, child) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    if child.is_composite() {
                        write!(f, "({child})")?;
                    } else {
                        write!(f, "{child}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Binding of variable names to positive integer values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<String, BigUint>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: BigUint) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<&BigUint> {
        self.values.get(name)
    }

    pub fn from_pairs<N: Into<String>>(pairs: impl IntoIterator<Item = (N, u64)>) -> Self {
        let mut asg = Assignment::new();
        for (name, value) in pairs {
            asg.set(name, BigUint::from(value));
        }
        asg
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &BigUint)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Result of instantiating a pattern: the collapsed value set, or a marker
/// for assignments where two terms collide and the pattern demands
/// pairwise-distinct term values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceValues {
    Values(BTreeSet<BigUint>),
    Degenerate,
}

/// A configuration to be found monochromatic: an ordered list of terms
/// over a shared variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    terms: Vec<Term>,
    variables: Vec<String>,
    distinct_values: bool,
}

impl Pattern {
    /// Builds a pattern from terms, deriving the variable list in
    /// first-occurrence order.
    pub fn new(terms: Vec<Term>, distinct_values: bool) -> Result<Self, PatternError> {
        if terms.is_empty() {
            return Err(PatternError::Empty);
        }
        let mut variables = Vec::new();
        for term in &terms {
            term.collect_variables(&mut variables);
        }
        if variables.is_empty() {
            return Err(PatternError::NoVariables);
        }
        Ok(Pattern {
            terms,
            variables,
            distinct_values,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse_pattern(text)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn distinct_values(&self) -> bool {
        self.distinct_values
    }

    pub fn set_distinct_values(&mut self, flag: bool) {
        self.distinct_values = flag;
    }

    /// Evaluates every term under `asg` and collapses the results into a
    /// set. With `distinct_values` set, a collision between two terms
    /// yields [`InstanceValues::Degenerate`] instead.
    pub fn instantiate(&self, asg: &Assignment) -> Result<InstanceValues, EvalError> {
        let mut values = BTreeSet::new();
        for term in &self.terms {
            let value = term.eval(asg)?;
            if !values.insert(value) && self.distinct_values {
                return Ok(InstanceValues::Degenerate);
            }
        }
        Ok(InstanceValues::Values(values))
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{term}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern must contain at least one term")]
    Empty,
    #[error("pattern must contain at least one variable")]
    NoVariables,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("constant 0 is not allowed at byte {position}; values start at 1")]
    ZeroConstant { position: usize },
    #[error("constant at byte {position} does not fit in 64 bits")]
    ConstantTooLarge { position: usize },
    #[error("term exceeds the {limit}-node limit")]
    NodeLimit { limit: usize },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
}

/// Parses a pattern with the default node limit. Variables are listed in
/// first-occurrence order and `distinct_values` defaults to false.
pub fn parse_pattern(text: &str) -> Result<Pattern, ParseError> {
    parse_pattern_with_limit(text, MAX_TERM_NODES)
}

pub fn parse_pattern_with_limit(text: &str, max_nodes: usize) -> Result<Pattern, ParseError> {
    let mut parser = Parser {
        input: text.as_bytes(),
        pos: 0,
        max_nodes,
    };
    let mut terms = vec![parser.parse_term()?];
    parser.skip_ws();
    while parser.peek() == Some(b',') {
        parser.pos += 1;
        terms.push(parser.parse_term()?);
        parser.skip_ws();
    }
    if let Some(c) = parser.peek() {
        return Err(parser.unexpected(c));
    }
    Ok(Pattern::new(terms, false)?)
}

/// Evaluates a single term; see [`Term::eval`].
pub fn eval_term(term: &Term, asg: &Assignment) -> Result<BigUint, EvalError> {
    term.eval(asg)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    max_nodes: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self
            .input
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn unexpected(&self, byte: u8) -> ParseError {
        ParseError::Syntax {
            position: self.pos,
            message: format!("unexpected character `{}`", byte as char),
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let term = self.parse_expr()?;
        if term.node_count() > self.max_nodes {
            return Err(ParseError::NodeLimit {
                limit: self.max_nodes,
            });
        }
        Ok(term)
    }

    fn parse_expr(&mut self) -> Result<Term, ParseError> {
        let mut parts = vec![self.parse_product()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            parts.push(self.parse_product()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Term::Sum(parts)
        })
    }

    fn parse_product(&mut self) -> Result<Term, ParseError> {
        let mut parts = vec![self.parse_atom()?];
        while self.peek() == Some(b'*') {
            self.pos += 1;
            parts.push(self.parse_atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Term::Product(parts)
        })
    }

    fn parse_atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                if self.peek() != Some(b')') {
                    return Err(ParseError::Syntax {
                        position: self.pos,
                        message: "expected `)`".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self
                    .input
                    .get(self.pos)
                    .is_some_and(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.input[start..self.pos])
                    .expect("ascii range")
                    .to_string();
                Ok(Term::Variable(name))
            }
            Some(b'0') => Err(ParseError::ZeroConstant { position: self.pos }),
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.input.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.input[start..self.pos]).expect("ascii");
                let value: u64 = digits
                    .parse()
                    .map_err(|_| ParseError::ConstantTooLarge { position: start })?;
                Ok(Term::Constant(value))
            }
            Some(c) => Err(self.unexpected(c)),
            None => Err(ParseError::Syntax {
                position: self.pos,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str) -> Term {
        Term::Variable(name.into())
    }

    #[test]
    fn parses_the_preset_quadruple() {
        let p = parse_pattern("a, b, a*b, (a+1)*b").unwrap();
        assert_eq!(p.terms().len(), 4);
        assert_eq!(p.variables(), ["a".to_string(), "b".to_string()]);
        assert!(!p.distinct_values());
        assert_eq!(
            p.terms()[3],
            Term::Product(vec![Term::Sum(vec![var("a"), Term::Constant(1)]), var("b")])
        );
    }

    #[test]
    fn parses_triple_with_shifted_factor() {
        let p = parse_pattern("a, b, b*(a+1)").unwrap();
        assert_eq!(p.terms().len(), 3);
        assert_eq!(p.variables(), ["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn parses_single_variable() {
        let p = parse_pattern("a").unwrap();
        assert_eq!(p.terms(), &[var("a")]);
        assert_eq!(p.variables(), ["a".to_string()]);
    }

    #[test]
    fn flattens_unparenthesized_chains() {
        let p = parse_pattern("a+b+c").unwrap();
        assert_eq!(p.terms()[0], Term::Sum(vec![var("a"), var("b"), var("c")]));
        let q = parse_pattern("(a+b)+c").unwrap();
        assert_eq!(
            q.terms()[0],
            Term::Sum(vec![Term::Sum(vec![var("a"), var("b")]), var("c")])
        );
    }

    #[test]
    fn rejects_zero_constant() {
        assert!(matches!(
            parse_pattern("a, 0"),
            Err(ParseError::ZeroConstant { .. })
        ));
        assert!(matches!(
            parse_pattern("a + 01"),
            Err(ParseError::ZeroConstant { .. })
        ));
    }

    #[test]
    fn reports_syntax_error_position() {
        match parse_pattern("a + ") {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(
            parse_pattern("a ^ b"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_pattern("(a+b"),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn rejects_constant_only_pattern() {
        assert!(matches!(
            parse_pattern("1, 2"),
            Err(ParseError::Pattern(PatternError::NoVariables))
        ));
    }

    #[test]
    fn enforces_node_limit() {
        let wide = vec!["a"; 40].join("+");
        assert!(parse_pattern_with_limit(&wide, 64).is_ok());
        assert!(matches!(
            parse_pattern_with_limit(&wide, 16),
            Err(ParseError::NodeLimit { limit: 16 })
        ));
    }

    #[test]
    fn evaluates_terms() {
        let p = parse_pattern("(a+1)*b").unwrap();
        let asg = Assignment::from_pairs([("a", 3), ("b", 5)]);
        assert_eq!(p.terms()[0].eval(&asg).unwrap(), BigUint::from(20u32));

        let id = parse_pattern("a").unwrap();
        let asg7 = Assignment::from_pairs([("a", 7)]);
        assert_eq!(id.terms()[0].eval(&asg7).unwrap(), BigUint::from(7u32));

        let prod = parse_pattern("a*b").unwrap();
        let ones = Assignment::from_pairs([("a", 1), ("b", 1)]);
        assert_eq!(prod.terms()[0].eval(&ones).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn eval_reports_unbound_variable() {
        let p = parse_pattern("a+b").unwrap();
        let asg = Assignment::from_pairs([("a", 1)]);
        assert_eq!(
            p.terms()[0].eval(&asg),
            Err(EvalError::UnboundVariable("b".into()))
        );
    }

    fn values_of(p: &Pattern, pairs: &[(&str, u64)]) -> BTreeSet<u64> {
        let asg = Assignment::from_pairs(pairs.iter().copied());
        match p.instantiate(&asg).unwrap() {
            InstanceValues::Values(vs) => vs
                .into_iter()
                .map(|v| u64::try_from(&v).expect("small value"))
                .collect(),
            InstanceValues::Degenerate => panic!("unexpected degenerate instance"),
        }
    }

    #[test]
    fn instantiation_collapses_duplicates() {
        let quad = parse_pattern("a, b, a*b, (a+1)*b").unwrap();
        assert_eq!(
            values_of(&quad, &[("a", 1), ("b", 1)]),
            BTreeSet::from([1, 2])
        );
        assert_eq!(
            values_of(&quad, &[("a", 2), ("b", 2)]),
            BTreeSet::from([2, 4, 6])
        );
        let schur = parse_pattern("a, b, a+b").unwrap();
        assert_eq!(
            values_of(&schur, &[("a", 1), ("b", 2)]),
            BTreeSet::from([1, 2, 3])
        );
    }

    #[test]
    fn distinct_flag_marks_collisions_degenerate() {
        let mut quad = parse_pattern("a, b, a*b, (a+1)*b").unwrap();
        quad.set_distinct_values(true);
        let collapsing = Assignment::from_pairs([("a", 1), ("b", 1)]);
        assert_eq!(
            quad.instantiate(&collapsing).unwrap(),
            InstanceValues::Degenerate
        );
        let separated = Assignment::from_pairs([("a", 2), ("b", 3)]);
        assert!(matches!(
            quad.instantiate(&separated).unwrap(),
            InstanceValues::Values(_)
        ));
    }

    #[test]
    fn display_round_trips_presets() {
        for text in [
            "a, b, a+b",
            "a, b, a*b",
            "a, a*b, a+b",
            "a, b, b*(a+1)",
            "a, b, a*b, (a+1)*b",
            "(a+b)+c, a*(b+1)*c, 17*a",
        ] {
            let p = parse_pattern(text).unwrap();
            let printed = p.to_string();
            let reparsed = parse_pattern(&printed).unwrap();
            assert_eq!(p, reparsed, "round trip failed for {text}: {printed}");
        }
    }
}
