//! JSON problem files.
//!
//! ```json
//! {"variables": ["a", "b"], "sense": "min",
//!  "objective": {"linear": {"a": 1}, "quadratic": [["a", "b", 2]], "constant": 0},
//!  "equalities": [{"coeffs": {"a": 1, "b": 1}, "rhs": 1}],
//!  "structural": [{"kind": "var_leq_var", "vars": ["a", "b"]}],
//!  "lambda": 100}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConstraintKind, LcqboProblem, LinearConstraint, Sense, StructuralConstraint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    pub sense: String,
    pub objective: ObjectiveFile,
    #[serde(default)]
    pub equalities: Vec<EqualityFile>,
    #[serde(default)]
    pub structural: Vec<StructuralFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveFile {
    #[serde(default)]
    pub linear: BTreeMap<String, f64>,
    #[serde(default)]
    pub quadratic: Vec<(String, String, f64)>,
    #[serde(default)]
    pub constant: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualityFile {
    pub coeffs: BTreeMap<String, i64>,
    pub rhs: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuralFile {
    pub kind: String,
    pub vars: Vec<String>,
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<LcqboProblem> {
        let sense = match self.sense.as_str() {
            "min" => Sense::Minimize,
            "max" => Sense::Maximize,
            other => return Err(Error::Parse(format!("sense: expected \"min\" or \"max\", got \"{other}\""))),
        };
        let mut p = LcqboProblem::new(self.variables, sense).map_err(|e| Error::Parse(format!("variables: {e}")))?;
        let lookup = |p: &LcqboProblem, field: &str, name: &str| {
            p.var_index(name).ok_or_else(|| Error::Parse(format!("{field}: unknown variable `{name}`")))
        };
        for (name, c) in &self.objective.linear {
            let v = lookup(&p, "objective.linear", name)?;
            p.add_linear(v, *c)?;
        }
        for (k, (a, b, c)) in self.objective.quadratic.iter().enumerate() {
            let field = format!("objective.quadratic[{k}]");
            let (i, j) = (lookup(&p, &field, a)?, lookup(&p, &field, b)?);
            p.add_quadratic(i, j, *c)?;
        }
        p.set_constant(self.objective.constant);
        for (k, e) in self.equalities.iter().enumerate() {
            let field = format!("equalities[{k}]");
            let coeffs = e
                .coeffs
                .iter()
                .map(|(name, a)| Ok((lookup(&p, &field, name)?, *a)))
                .collect::<Result<Vec<_>>>()?;
            let c = LinearConstraint::new(coeffs, e.rhs).map_err(|err| Error::Parse(format!("{field}: {err}")))?;
            p.add_equality(c)?;
        }
        for (k, s) in self.structural.iter().enumerate() {
            let field = format!("structural[{k}]");
            let kind = ConstraintKind::from_name(&s.kind)
                .ok_or_else(|| Error::Parse(format!("{field}.kind: unknown constraint kind \"{}\"", s.kind)))?;
            let vars = s.vars.iter().map(|name| lookup(&p, &field, name)).collect::<Result<Vec<_>>>()?;
            let c = StructuralConstraint::new(kind, vars).map_err(|err| Error::Parse(format!("{field}: {err}")))?;
            p.add_structural(c)?;
        }
        if let Some(lambda) = self.lambda {
            p.set_lambda(lambda).map_err(|e| Error::Parse(format!("lambda: {e}")))?;
        }
        Ok(p)
    }

    pub fn from_problem(p: &LcqboProblem) -> Self {
        let name = |v: usize| p.variables()[v].clone();
        ProblemFile {
            variables: p.variables().to_vec(),
            sense: match p.sense() {
                Sense::Minimize => "min".into(),
                Sense::Maximize => "max".into(),
            },
            objective: ObjectiveFile {
                linear: p
                    .linear()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0.0)
                    .map(|(v, c)| (name(v), *c))
                    .collect(),
                quadratic: p.quadratic().iter().map(|(&(i, j), &c)| (name(i), name(j), c)).collect(),
                constant: p.constant(),
            },
            equalities: p
                .equalities()
                .iter()
                .map(|e| EqualityFile { coeffs: e.coeffs.iter().map(|&(v, a)| (name(v), a)).collect(), rhs: e.rhs })
                .collect(),
            structural: p
                .structural()
                .iter()
                .map(|s| StructuralFile { kind: s.kind.name().into(), vars: s.vars.iter().map(|&v| name(v)).collect() })
                .collect(),
            lambda: Some(p.lambda()),
        }
    }
}

pub fn parse_problem(text: &str) -> Result<LcqboProblem> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_problem()
}

pub fn problem_to_json(p: &LcqboProblem) -> String {
    serde_json::to_string_pretty(&ProblemFile::from_problem(p)).expect("problem serializes")
}

pub fn load_problem(path: &Path) -> Result<LcqboProblem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_problem(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_flp, build_lap};

    const FLP: &str = r#"{
        "variables": ["x1_1", "x2_1", "y1", "y2"],
        "sense": "min",
        "objective": {"linear": {"y1": 5, "y2": 10, "x1_1": 3, "x2_1": 2}},
        "equalities": [{"coeffs": {"x1_1": 1, "x2_1": 1}, "rhs": 1}],
        "structural": [
            {"kind": "var_leq_var", "vars": ["x1_1", "y1"]},
            {"kind": "var_leq_var", "vars": ["x2_1", "y2"]}
        ],
        "lambda": 100
    }"#;

    #[test]
    fn parses_flp_and_matches_builder() {
        let p = parse_problem(FLP).unwrap();
        assert_eq!(p, build_flp(2, 1, &[5.0, 10.0], &[vec![3.0], vec![2.0]]).unwrap());
    }

    #[test]
    fn round_trip_is_identity() {
        for p in [parse_problem(FLP).unwrap(), build_lap(2, 2, &[vec![5.0, 8.0], vec![7.0, 11.0]]).unwrap()] {
            let again = parse_problem(&problem_to_json(&p)).unwrap();
            assert_eq!(again, p);
        }
    }

    #[test]
    fn unknown_field_rejected() {
        let text = FLP.replace("\"lambda\"", "\"lamda\"");
        let err = parse_problem(&text).unwrap_err().to_string();
        assert!(err.contains("lamda"), "{err}");
    }

    #[test]
    fn errors_name_the_field() {
        let text = FLP.replace(r#"["x2_1", "y2"]"#, r#"["x2_1", "z"]"#);
        let err = parse_problem(&text).unwrap_err().to_string();
        assert!(err.contains("structural[1]") && err.contains("`z`"), "{err}");

        let text = FLP.replace("var_leq_var\", \"vars\": [\"x1_1\"", "bogus\", \"vars\": [\"x1_1\"");
        let err = parse_problem(&text).unwrap_err().to_string();
        assert!(err.contains("structural[0].kind"), "{err}");

        let text = FLP.replace("\"min\"", "\"minimise\"");
        assert!(parse_problem(&text).unwrap_err().to_string().contains("sense"));

        let text = FLP.replace("\"lambda\": 100", "\"lambda\": -1");
        assert!(parse_problem(&text).unwrap_err().to_string().contains("lambda"));
    }

    #[test]
    fn missing_required_field_named() {
        let err = parse_problem(r#"{"sense": "min", "objective": {}}"#).unwrap_err().to_string();
        assert!(err.contains("variables"), "{err}");
    }
}
