//! DIMACS CNF export of the avoidance problem.
//!
//! Variable `(m−1)·r + c + 1` is true iff the integer `m` receives color
//! `c`. For each `m` there is an at-least-one clause over the colors and
//! pairwise at-most-one clauses; for each instance `{t_1, ..., t_k}` with
//! `k ≥ 2` and each color `c` there is the clause
//! `(¬v_{t_1,c} ∨ ... ∨ ¬v_{t_k,c})`. The formula is satisfiable iff an
//! avoiding coloring of `[1, n]` exists.
//!
//! [`solve`] is a miniature DPLL (unit propagation, fixed branching
//! order) meant for validating exports when no external solver is
//! around — not an industrial solver.

use crate::coloring::{Color, Coloring};
use crate::pattern::Pattern;
use crate::search::{enumerate_instances, SearchError};

/// CNF formula plus the comments that document the encoding.
#[derive(Debug, Clone)]
pub struct CnfDocument {
    num_vars: u64,
    clauses: Vec<Vec<i64>>,
    comments: Vec<String>,
}

impl CnfDocument {
    pub fn new(num_vars: u64, clauses: Vec<Vec<i64>>, comments: Vec<String>) -> Self {
        CnfDocument {
            num_vars,
            clauses,
            comments,
        }
    }

    pub fn num_vars(&self) -> u64 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        for comment in &self.comments {
            out.push_str("c ");
            out.push_str(comment);
            out.push('\n');
        }
        out.push_str(&format!("p cnf {} {}\n", self.num_vars, self.clauses.len()));
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

/// The variable encoding `(m−1)·r + c + 1`.
pub fn coloring_var(m: u64, c: Color, r: Color) -> i64 {
    ((m - 1) * r as u64 + c as u64 + 1) as i64
}

/// Encodes "some r-coloring of [1, n] avoids every instance of `p`".
pub fn export_cnf(p: &Pattern, r: Color, n: u64) -> Result<CnfDocument, SearchError> {
    if r == 0 {
        return Err(SearchError::ZeroColors);
    }
    let table = enumerate_instances(p, n)?;
    let num_vars = n
        .checked_mul(r as u64)
        .filter(|&v| v <= i32::MAX as u64)
        .ok_or(SearchError::BoundTooLarge(n))?;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    for m in 1..=n {
        clauses.push((0..r).map(|c| coloring_var(m, c, r)).collect());
        for c1 in 0..r {
            for c2 in c1 + 1..r {
                clauses.push(vec![-coloring_var(m, c1, r), -coloring_var(m, c2, r)]);
            }
        }
    }
    for inst in table.instances() {
        if inst.len() < 2 {
            continue;
        }
        for c in 0..r {
            clauses.push(inst.iter().map(|&t| -coloring_var(t, c, r)).collect());
        }
    }
    let comments = vec![
        format!("avoidance encoding for pattern: {p}"),
        format!("n = {n}, colors = {r}"),
        "variable (m-1)*r + c + 1 is true iff integer m has color c".to_string(),
        "satisfiable iff an avoiding coloring of [1, n] exists".to_string(),
    ];
    Ok(CnfDocument::new(num_vars, clauses, comments))
}

/// Decides satisfiability; returns a model indexed by `var − 1` or `None`
/// for unsatisfiable. Variables left unconstrained by propagation default
/// to false.
pub fn solve(doc: &CnfDocument) -> Option<Vec<bool>> {
    let mut solver = Solver::new(doc.num_vars as usize, doc.clauses());
    // top-level units (and the empty clause) first
    for clause in doc.clauses() {
        if clause.is_empty() {
            return None;
        }
        if clause.len() == 1 && !solver.assign_and_propagate(clause[0]) {
            return None;
        }
    }
    if !solver.dpll() {
        return None;
    }
    Some(
        solver
            .assign
            .iter()
            .map(|v| v.unwrap_or(false))
            .collect(),
    )
}

/// Reads a coloring off a model of an avoidance CNF.
pub fn model_to_coloring(model: &[bool], n: u64, r: Color) -> Option<Coloring> {
    let mut colors = Vec::with_capacity(n as usize);
    for m in 1..=n {
        let c = (0..r).find(|&c| model[(coloring_var(m, c, r) - 1) as usize])?;
        colors.push(c);
    }
    Coloring::new(r, colors).ok()
}

struct Solver {
    clauses: Vec<Vec<i64>>,
    /// literal occurrence lists; literal `l` maps to `2(|l|−1) + (l<0)`
    occ: Vec<Vec<u32>>,
    assign: Vec<Option<bool>>,
    trail: Vec<usize>,
}

fn lit_slot(lit: i64) -> usize {
    (lit.unsigned_abs() as usize - 1) * 2 + usize::from(lit < 0)
}

impl Solver {
    fn new(num_vars: usize, clauses: &[Vec<i64>]) -> Self {
        let mut occ = vec![Vec::new(); num_vars * 2];
        for (cid, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                occ[lit_slot(lit)].push(cid as u32);
            }
        }
        Solver {
            clauses: clauses.to_vec(),
            occ,
            assign: vec![None; num_vars],
            trail: Vec::new(),
        }
    }

    fn value(&self, lit: i64) -> Option<bool> {
        self.assign[lit.unsigned_abs() as usize - 1].map(|b| if lit > 0 { b } else { !b })
    }

    /// Makes `lit` true and runs unit propagation; false on conflict.
    fn assign_and_propagate(&mut self, lit: i64) -> bool {
        let mut queue = vec![lit];
        while let Some(l) = queue.pop() {
            match self.value(l) {
                Some(true) => continue,
                Some(false) => return false,
                None => {}
            }
            let var = l.unsigned_abs() as usize - 1;
            self.assign[var] = Some(l > 0);
            self.trail.push(var);
            // only clauses containing ¬l can become unit or empty
            let watch = lit_slot(-l);
            for i in 0..self.occ[watch].len() {
                let cid = self.occ[watch][i] as usize;
                let mut unassigned: Option<i64> = None;
                let mut satisfied = false;
                let mut open = 0;
                for &cl in &self.clauses[cid] {
                    match self.value(cl) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unassigned = Some(cl);
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => queue.push(unassigned.expect("open literal recorded")),
                    _ => {}
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let var = self.trail.pop().expect("trail is nonempty");
            self.assign[var] = None;
        }
    }

    fn dpll(&mut self) -> bool {
        let var = match self.assign.iter().position(Option::is_none) {
            Some(v) => v,
            None => return true,
        };
        for phase in [true, false] {
            let lit = if phase { var as i64 + 1 } else { -(var as i64 + 1) };
            let mark = self.trail.len();
            if self.assign_and_propagate(lit) && self.dpll() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;
    use crate::search::verify_avoidance;

    #[test]
    fn schur_two_colors_two_integers() {
        let p = parse_pattern("a, b, a+b").unwrap();
        let doc = export_cnf(&p, 2, 2).unwrap();
        assert_eq!(doc.num_vars(), 4);
        // ALO + AMO per integer, plus the single instance {1,2} per color
        assert_eq!(doc.clauses().len(), 2 + 2 + 2);
        let model = solve(&doc).expect("distinct colors avoid {1,2}");
        let coloring = model_to_coloring(&model, 2, 2).unwrap();
        assert!(verify_avoidance(&coloring, &p).unwrap());
    }

    #[test]
    fn schur_unsat_at_its_forcing_number() {
        let p = parse_pattern("a, b, a+b").unwrap();
        let doc = export_cnf(&p, 2, 5).unwrap();
        assert_eq!(solve(&doc), None);
        let doc4 = export_cnf(&p, 2, 4).unwrap();
        assert!(solve(&doc4).is_some());
    }

    #[test]
    fn vacuous_single_variable_formula() {
        let p = parse_pattern("a, b, a+b").unwrap();
        let doc = export_cnf(&p, 1, 1).unwrap();
        assert_eq!(doc.num_vars(), 1);
        assert_eq!(doc.clauses().len(), 1); // just the at-least-one clause
        assert!(solve(&doc).is_some());
    }

    #[test]
    fn dimacs_shape() {
        let p = parse_pattern("a, b, a+b").unwrap();
        let doc = export_cnf(&p, 2, 2).unwrap();
        let text = doc.to_dimacs();
        assert!(text.contains("p cnf 4 6"));
        assert!(text.starts_with("c "));
        assert!(text.contains("(m-1)*r + c + 1"));
        for line in text.lines().skip_while(|l| l.starts_with('c')).skip(1) {
            assert!(line.ends_with(" 0"));
        }
    }

    #[test]
    fn dpll_basics() {
        let sat = CnfDocument::new(2, vec![vec![1, 2], vec![-1, 2]], vec![]);
        let model = solve(&sat).unwrap();
        assert!(model[1]);
        let unsat = CnfDocument::new(1, vec![vec![1], vec![-1]], vec![]);
        assert_eq!(solve(&unsat), None);
        let empty_clause = CnfDocument::new(1, vec![vec![]], vec![]);
        assert_eq!(solve(&empty_clause), None);
    }
}
