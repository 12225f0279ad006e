//! Penalty reduction to QUBO and the Ising substitution `x = (1 - z) / 2`.

use std::collections::BTreeMap;

use super::{ConstraintKind, LcqboProblem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyScope {
    /// Equalities plus every structural constraint with a known penalty form.
    #[default]
    All,
    /// Only the linear equalities; structural constraints are left to the ansatz.
    EqualitiesOnly,
}

/// Minimization-sense quadratic pseudo-boolean function.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    pub num_vars: usize,
    pub linear: Vec<f64>,
    /// Keys `(i, j)` with `i < j`.
    pub quadratic: BTreeMap<(usize, usize), f64>,
    pub constant: f64,
    pub lambda: f64,
}

impl QuboModel {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, linear: vec![0.0; num_vars], quadratic: BTreeMap::new(), constant: 0.0, lambda: 0.0 }
    }

    pub fn add_linear(&mut self, i: usize, c: f64) {
        self.linear[i] += c;
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        if i == j {
            self.linear[i] += c;
        } else {
            *self.quadratic.entry((i.min(j), i.max(j))).or_insert(0.0) += c;
        }
    }

    pub fn eval_index(&self, index: usize) -> f64 {
        let bit = |v: usize| ((index >> v) & 1) as f64;
        let lin: f64 = self.linear.iter().enumerate().map(|(v, c)| c * bit(v)).sum();
        let quad: f64 = self.quadratic.iter().map(|(&(i, j), c)| c * bit(i) * bit(j)).sum();
        self.constant + lin + quad
    }

    pub fn eval(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.num_vars {
            return Err(Error::BitLength { expected: self.num_vars, got: bits.len() });
        }
        Ok(self.eval_index(crate::statevector::BitConvention::index(bits)))
    }

    /// Value at every basis index.
    pub fn values(&self) -> Vec<f64> {
        (0..1usize << self.num_vars).map(|i| self.eval_index(i)).collect()
    }

    pub fn to_ising(&self) -> IsingModel {
        let n = self.num_vars;
        let mut h = vec![0.0; n];
        let mut j = BTreeMap::new();
        let mut offset = self.constant;
        // a x = a/2 - (a/2) z
        for (i, &a) in self.linear.iter().enumerate() {
            offset += a / 2.0;
            h[i] -= a / 2.0;
        }
        // b x_i x_j = b/4 (1 - z_i - z_j + z_i z_j)
        for (&(a, b), &w) in &self.quadratic {
            offset += w / 4.0;
            h[a] -= w / 4.0;
            h[b] -= w / 4.0;
            *j.entry((a, b)).or_insert(0.0) += w / 4.0;
        }
        IsingModel { h, j, offset }
    }
}

/// Diagonal Hamiltonian `offset + sum h_i Z_i + sum J_ij Z_i Z_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Keys `(i, j)` with `i < j`.
    pub j: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn num_qubits(&self) -> usize {
        self.h.len()
    }

    /// Energy of the computational basis state `index`, with `Z|1> = -|1>`.
    pub fn eval_index(&self, index: usize) -> f64 {
        let z = |v: usize| if (index >> v) & 1 == 1 { -1.0 } else { 1.0 };
        let field: f64 = self.h.iter().enumerate().map(|(i, h)| h * z(i)).sum();
        let coupling: f64 = self.j.iter().map(|(&(a, b), w)| w * z(a) * z(b)).sum();
        self.offset + field + coupling
    }

    /// Terms with nonzero coefficients, as they would appear in a cost layer.
    pub fn nonzero_fields(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.h.iter().copied().enumerate().filter(|(_, h)| *h != 0.0)
    }

    pub fn nonzero_couplings(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.j.iter().map(|(&k, &w)| (k, w)).filter(|(_, w)| *w != 0.0)
    }
}

/// Sign-adjusted objective plus `lambda`-weighted constraint penalties.
pub fn penalize(problem: &LcqboProblem, lambda: f64, scope: PenaltyScope) -> Result<QuboModel> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::BadLambda(lambda));
    }
    let n = problem.num_vars();
    let sign = problem.sense().min_sign();
    let mut q = QuboModel::new(n);
    q.lambda = lambda;
    q.constant = sign * problem.constant();
    for (i, &c) in problem.linear().iter().enumerate() {
        q.add_linear(i, sign * c);
    }
    for (&(i, j), &c) in problem.quadratic() {
        q.add_quadratic(i, j, sign * c);
    }

    // lambda (sum a_i x_i - b)^2 with x_i^2 = x_i
    for e in problem.equalities() {
        let b = e.rhs as f64;
        q.constant += lambda * b * b;
        for (k, &(i, a)) in e.coeffs.iter().enumerate() {
            let a = a as f64;
            q.add_linear(i, lambda * (a * a - 2.0 * a * b));
            for &(j, a2) in &e.coeffs[k + 1..] {
                q.add_quadratic(i, j, lambda * 2.0 * a * a2 as f64);
            }
        }
    }

    if scope == PenaltyScope::All {
        for c in problem.structural() {
            match c.kind {
                ConstraintKind::VarLeqVar => add_leq_penalty(&mut q, c.vars[0], c.vars[1], lambda),
                ConstraintKind::ChainMonotone => {
                    for w in c.vars.windows(2) {
                        add_leq_penalty(&mut q, w[0], w[1], lambda);
                    }
                }
                ConstraintKind::AtMostOne => {
                    for (k, &i) in c.vars.iter().enumerate() {
                        for &j in &c.vars[..k] {
                            q.add_quadratic(i, j, lambda);
                        }
                    }
                }
                ConstraintKind::SumLeqLast | ConstraintKind::SumEqLast => {
                    return Err(Error::NoPenaltyForm(c.kind.name()));
                }
            }
        }
    }
    Ok(q)
}

/// `lambda (x - x y)`, zero unless `x = 1, y = 0`.
fn add_leq_penalty(q: &mut QuboModel, x: usize, y: usize, lambda: f64) {
    q.add_linear(x, lambda);
    q.add_quadratic(x, y, -lambda);
}
