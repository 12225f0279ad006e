//! Linearly constrained quadratic binary problems and their reductions.

pub mod instances;
pub mod io;
pub mod oracle;
pub mod qubo;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::statevector::BitConvention;

pub use instances::{build_flp, build_lap};
pub use io::{load_problem, parse_problem, problem_to_json, ProblemFile};
pub use oracle::{brute_force_problem, brute_force_qubo, ProblemOracle, QuboOracle, MAX_ORACLE_VARS};
pub use qubo::{penalize, IsingModel, PenaltyScope, QuboModel};

/// Penalty weight used when none is given.
pub const DEFAULT_LAMBDA: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// Factor turning an objective in this sense into a minimization objective.
    pub fn min_sign(self) -> f64 {
        match self {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintKind {
    /// `v[k] <= v[k+1]` for consecutive entries.
    ChainMonotone,
    /// `sum v <= 1`.
    AtMostOne,
    /// `sum v[..last] <= v[last]`.
    SumLeqLast,
    /// `sum v[..last] == v[last]`.
    SumEqLast,
    /// `v[0] <= v[1]`.
    VarLeqVar,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::ChainMonotone => "chain",
            ConstraintKind::AtMostOne => "at_most_one",
            ConstraintKind::SumLeqLast => "sum_leq_last",
            ConstraintKind::SumEqLast => "sum_eq_last",
            ConstraintKind::VarLeqVar => "var_leq_var",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "chain" => ConstraintKind::ChainMonotone,
            "at_most_one" => ConstraintKind::AtMostOne,
            "sum_leq_last" => ConstraintKind::SumLeqLast,
            "sum_eq_last" => ConstraintKind::SumEqLast,
            "var_leq_var" => ConstraintKind::VarLeqVar,
            _ => return None,
        })
    }
}

/// A structurally tagged inequality over variable (or qubit) indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuralConstraint {
    pub kind: ConstraintKind,
    pub vars: Vec<usize>,
}

impl StructuralConstraint {
    pub fn new(kind: ConstraintKind, vars: Vec<usize>) -> Result<Self> {
        let ok = match kind {
            ConstraintKind::VarLeqVar => vars.len() == 2,
            _ => vars.len() >= 2,
        };
        if !ok {
            return Err(Error::InvalidProblem(format!(
                "{} constraint needs {} variables, got {}",
                kind.name(),
                if kind == ConstraintKind::VarLeqVar { "exactly 2" } else { "at least 2" },
                vars.len()
            )));
        }
        let mut seen = vars.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != vars.len() {
            return Err(Error::InvalidProblem(format!("{} constraint repeats a variable", kind.name())));
        }
        Ok(Self { kind, vars })
    }

    pub fn satisfied_by_index(&self, index: usize) -> bool {
        let bit = |v: usize| (index >> v) & 1;
        let (head, last) = self.vars.split_at(self.vars.len() - 1);
        match self.kind {
            ConstraintKind::ChainMonotone => self.vars.windows(2).all(|w| bit(w[0]) <= bit(w[1])),
            ConstraintKind::AtMostOne => self.vars.iter().map(|&v| bit(v)).sum::<usize>() <= 1,
            ConstraintKind::SumLeqLast => head.iter().map(|&v| bit(v)).sum::<usize>() <= bit(last[0]),
            ConstraintKind::SumEqLast => head.iter().map(|&v| bit(v)).sum::<usize>() == bit(last[0]),
            ConstraintKind::VarLeqVar => bit(self.vars[0]) <= bit(self.vars[1]),
        }
    }
}

/// `sum coeffs[i] * x[i] == rhs` with integer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, i64)>,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<(usize, i64)>, rhs: i64) -> Result<Self> {
        let mut merged: BTreeMap<usize, i64> = BTreeMap::new();
        for (v, a) in coeffs {
            *merged.entry(v).or_insert(0) += a;
        }
        let coeffs: Vec<(usize, i64)> = merged.into_iter().filter(|&(_, a)| a != 0).collect();
        if coeffs.is_empty() {
            return Err(Error::InvalidProblem("equality constraint has no nonzero coefficient".into()));
        }
        Ok(Self { coeffs, rhs })
    }

    pub fn residual_at_index(&self, index: usize) -> i64 {
        self.coeffs.iter().map(|&(v, a)| a * ((index >> v) & 1) as i64).sum::<i64>() - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Equality { index: usize, residual: i64 },
    Structural { index: usize, kind: ConstraintKind },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Raw objective in the problem's own sense.
    pub objective: f64,
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcqboProblem {
    variables: Vec<String>,
    sense: Sense,
    linear: Vec<f64>,
    /// Keys `(i, j)` with `i < j`.
    quadratic: BTreeMap<(usize, usize), f64>,
    constant: f64,
    equalities: Vec<LinearConstraint>,
    structural: Vec<StructuralConstraint>,
    lambda: f64,
}

impl LcqboProblem {
    pub fn new(variables: Vec<String>, sense: Sense) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::InvalidProblem("no variables declared".into()));
        }
        for (i, name) in variables.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidProblem(format!("variables[{i}] is empty")));
            }
            if variables[..i].contains(name) {
                return Err(Error::InvalidProblem(format!("duplicate variable `{name}`")));
            }
        }
        let n = variables.len();
        Ok(Self {
            variables,
            sense,
            linear: vec![0.0; n],
            quadratic: BTreeMap::new(),
            constant: 0.0,
            equalities: Vec::new(),
            structural: Vec::new(),
            lambda: DEFAULT_LAMBDA,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn equalities(&self) -> &[LinearConstraint] {
        &self.equalities
    }

    pub fn structural(&self) -> &[StructuralConstraint] {
        &self.structural
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn set_lambda(&mut self, lambda: f64) -> Result<()> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::BadLambda(lambda));
        }
        self.lambda = lambda;
        Ok(())
    }

    fn check_var(&self, v: usize) -> Result<()> {
        if v >= self.num_vars() {
            return Err(Error::InvalidProblem(format!("variable index {v} out of range")));
        }
        Ok(())
    }

    pub fn add_linear(&mut self, v: usize, coeff: f64) -> Result<()> {
        self.check_var(v)?;
        self.linear[v] += coeff;
        Ok(())
    }

    /// `x_i * x_i` folds into the linear term.
    pub fn add_quadratic(&mut self, i: usize, j: usize, coeff: f64) -> Result<()> {
        self.check_var(i)?;
        self.check_var(j)?;
        if i == j {
            self.linear[i] += coeff;
        } else {
            *self.quadratic.entry((i.min(j), i.max(j))).or_insert(0.0) += coeff;
        }
        Ok(())
    }

    pub fn set_constant(&mut self, c: f64) {
        self.constant = c;
    }

    pub fn add_equality(&mut self, c: LinearConstraint) -> Result<()> {
        for &(v, _) in &c.coeffs {
            self.check_var(v)?;
        }
        self.equalities.push(c);
        Ok(())
    }

    pub fn add_structural(&mut self, c: StructuralConstraint) -> Result<()> {
        for &v in &c.vars {
            self.check_var(v)?;
        }
        self.structural.push(c);
        Ok(())
    }

    /// Raw objective at a basis index (qubit `q` = variable `q`).
    pub fn objective_at_index(&self, index: usize) -> f64 {
        let bit = |v: usize| ((index >> v) & 1) as f64;
        let lin: f64 = self.linear.iter().enumerate().map(|(v, c)| c * bit(v)).sum();
        let quad: f64 = self.quadratic.iter().map(|(&(i, j), c)| c * bit(i) * bit(j)).sum();
        self.constant + lin + quad
    }

    pub fn structurally_feasible_index(&self, index: usize) -> bool {
        self.structural.iter().all(|c| c.satisfied_by_index(index))
    }

    pub fn feasible_index(&self, index: usize) -> bool {
        self.equalities.iter().all(|e| e.residual_at_index(index) == 0) && self.structurally_feasible_index(index)
    }

    pub fn evaluate_index(&self, index: usize) -> Evaluation {
        let mut violations = Vec::new();
        for (i, e) in self.equalities.iter().enumerate() {
            let residual = e.residual_at_index(index);
            if residual != 0 {
                violations.push(Violation::Equality { index: i, residual });
            }
        }
        for (i, c) in self.structural.iter().enumerate() {
            if !c.satisfied_by_index(index) {
                violations.push(Violation::Structural { index: i, kind: c.kind });
            }
        }
        Evaluation { objective: self.objective_at_index(index), feasible: violations.is_empty(), violations }
    }

    pub fn evaluate(&self, bits: &[u8]) -> Result<Evaluation> {
        if bits.len() != self.num_vars() {
            return Err(Error::BitLength { expected: self.num_vars(), got: bits.len() });
        }
        Ok(self.evaluate_index(BitConvention::index(bits)))
    }

    fn term(&self, coeff: f64, vars: &str, first: bool) -> String {
        let sign = if coeff < 0.0 { "-" } else if first { "" } else { "+" };
        let mag = coeff.abs();
        let pad = if first { "" } else { " " };
        if mag == 1.0 {
            format!("{pad}{sign}{pad}{vars}")
        } else {
            format!("{pad}{sign}{pad}{mag} {vars}")
        }
    }
}

impl fmt::Display for LcqboProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: usize| self.variables[v].as_str();
        let verb = match self.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        let mut obj = String::new();
        for (v, &c) in self.linear.iter().enumerate().filter(|(_, c)| **c != 0.0) {
            obj += &self.term(c, name(v), obj.is_empty());
        }
        for (&(i, j), &c) in self.quadratic.iter().filter(|(_, c)| **c != 0.0) {
            obj += &self.term(c, &format!("{}*{}", name(i), name(j)), obj.is_empty());
        }
        if self.constant != 0.0 || obj.is_empty() {
            obj += &format!("{}{}", if obj.is_empty() { "" } else { " + " }, self.constant);
        }
        writeln!(f, "{verb} {obj}")?;
        for e in &self.equalities {
            let mut lhs = String::new();
            for &(v, a) in &e.coeffs {
                lhs += &self.term(a as f64, name(v), lhs.is_empty());
            }
            writeln!(f, "  s.t. {lhs} = {}", e.rhs)?;
        }
        for c in &self.structural {
            let names: Vec<&str> = c.vars.iter().map(|&v| name(v)).collect();
            let (head, last) = names.split_at(names.len() - 1);
            let line = match c.kind {
                ConstraintKind::ChainMonotone => names.join(" <= "),
                ConstraintKind::AtMostOne => format!("{} <= 1", names.join(" + ")),
                ConstraintKind::SumLeqLast => format!("{} <= {}", head.join(" + "), last[0]),
                ConstraintKind::SumEqLast => format!("{} = {}", head.join(" + "), last[0]),
                ConstraintKind::VarLeqVar => format!("{} <= {}", names[0], names[1]),
            };
            writeln!(f, "  s.t. {line}    [{}]", c.kind.name())?;
        }
        writeln!(f, "  lambda = {}", self.lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flp() -> LcqboProblem {
        build_flp(2, 1, &[5.0, 10.0], &[vec![3.0], vec![2.0]]).unwrap()
    }

    #[test]
    fn flp_paper_point_is_feasible_with_objective_8() {
        let e = flp().evaluate(&[1, 0, 1, 0]).unwrap();
        assert_eq!(e.objective, 8.0);
        assert!(e.feasible);
    }

    #[test]
    fn flp_all_zero_violates_assignment() {
        let e = flp().evaluate(&[0, 0, 0, 0]).unwrap();
        assert_eq!(e.objective, 0.0);
        assert!(!e.feasible);
        assert_eq!(e.violations, vec![Violation::Equality { index: 0, residual: -1 }]);
    }

    #[test]
    fn lap_paper_point_objective_15() {
        let p = build_lap(2, 2, &[vec![5.0, 8.0], vec![7.0, 11.0]]).unwrap();
        let e = p.evaluate(&[0, 1, 1, 0]).unwrap();
        assert_eq!(e.objective, 15.0);
        assert!(e.feasible);
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        assert_eq!(flp().evaluate(&[1, 0]), Err(Error::BitLength { expected: 4, got: 2 }));
    }

    #[test]
    fn self_pair_folds_into_linear() {
        let mut p = LcqboProblem::new(vec!["a".into(), "b".into()], Sense::Minimize).unwrap();
        p.add_quadratic(1, 1, 3.0).unwrap();
        assert!(p.quadratic().is_empty());
        assert_eq!(p.linear(), &[0.0, 3.0]);
    }

    #[test]
    fn structural_arity_checked() {
        assert!(StructuralConstraint::new(ConstraintKind::VarLeqVar, vec![0, 1, 2]).is_err());
        assert!(StructuralConstraint::new(ConstraintKind::AtMostOne, vec![0]).is_err());
        assert!(StructuralConstraint::new(ConstraintKind::ChainMonotone, vec![0, 0]).is_err());
        assert!(LinearConstraint::new(vec![(0, 1), (0, -1)], 0).is_err());
    }

    #[test]
    fn duplicate_variable_rejected() {
        assert!(LcqboProblem::new(vec!["a".into(), "a".into()], Sense::Minimize).is_err());
    }

    #[test]
    fn feasibility_matches_direct_arithmetic() {
        // Every kind over 5 variables, checked against hand-written arithmetic.
        let vars = vec![0, 2, 3, 4];
        for index in 0..32usize {
            let b: Vec<i32> = (0..5).map(|q| ((index >> q) & 1) as i32).collect();
            let x: Vec<i32> = vars.iter().map(|&v| b[v]).collect();
            let s3: i32 = x[..3].iter().sum();
            let cases = [
                (ConstraintKind::ChainMonotone, x[0] <= x[1] && x[1] <= x[2] && x[2] <= x[3]),
                (ConstraintKind::AtMostOne, x.iter().sum::<i32>() <= 1),
                (ConstraintKind::SumLeqLast, s3 <= x[3]),
                (ConstraintKind::SumEqLast, s3 == x[3]),
            ];
            for (kind, expected) in cases {
                let c = StructuralConstraint::new(kind, vars.clone()).unwrap();
                assert_eq!(c.satisfied_by_index(index), expected, "{kind:?} at {index:05b}");
            }
            let c = StructuralConstraint::new(ConstraintKind::VarLeqVar, vec![4, 1]).unwrap();
            assert_eq!(c.satisfied_by_index(index), b[4] <= b[1]);
        }
    }

    #[test]
    fn display_shows_interpreted_lap_model() {
        let p = build_lap(2, 2, &[vec![5.0, 8.0], vec![7.0, 11.0]]).unwrap();
        let text = p.to_string();
        assert!(text.starts_with("minimize 5 x1_1 + 8 x1_2 + 7 x2_1 + 11 x2_2"), "{text}");
        assert!(text.contains("x1_1 + x2_1 <= 1"));
    }
}
