//! Exhaustive enumeration over all `2^n` bitstrings.

use rayon::prelude::*;

use super::{qubo::QuboModel, LcqboProblem};
use crate::error::{Error, Result};

pub const MAX_ORACLE_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct QuboOracle {
    pub best_index: usize,
    pub best_value: f64,
    /// Value at every basis index.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemOracle {
    /// Best feasible point by raw objective in the problem's sense; `None` if nothing is feasible.
    pub best_index: Option<usize>,
    pub best_objective: Option<f64>,
    pub objectives: Vec<f64>,
    pub feasible: Vec<bool>,
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ORACLE_VARS {
        return Err(Error::TooManyVariables { got: n, max: MAX_ORACLE_VARS });
    }
    Ok(())
}

/// Lowest value; ties broken by lowest basis index.
fn argmin(values: &[f64], admissible: impl Fn(usize) -> bool + Sync) -> Option<usize> {
    values
        .par_iter()
        .enumerate()
        .filter(|(i, _)| admissible(*i))
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}

pub fn brute_force_qubo(q: &QuboModel) -> Result<QuboOracle> {
    check_size(q.num_vars)?;
    let values: Vec<f64> = (0..1usize << q.num_vars).into_par_iter().map(|i| q.eval_index(i)).collect();
    let best_index = argmin(&values, |_| true).expect("at least one bitstring");
    Ok(QuboOracle { best_index, best_value: values[best_index], values })
}

pub fn brute_force_problem(problem: &LcqboProblem) -> Result<ProblemOracle> {
    check_size(problem.num_vars())?;
    let dim = 1usize << problem.num_vars();
    let objectives: Vec<f64> = (0..dim).into_par_iter().map(|i| problem.objective_at_index(i)).collect();
    let feasible: Vec<bool> = (0..dim).into_par_iter().map(|i| problem.feasible_index(i)).collect();
    let sign = problem.sense().min_sign();
    let signed: Vec<f64> = objectives.iter().map(|v| sign * v).collect();
    let best_index = argmin(&signed, |i| feasible[i]);
    Ok(ProblemOracle { best_index, best_objective: best_index.map(|i| objectives[i]), objectives, feasible })
}
