//! Variational forms, baselines and gate accounting.

mod baseline;
mod closed_form;
mod feasibility;
mod tvf;

pub use baseline::{qaoa, two_local};
pub use closed_form::{closed_form_at_most_one, closed_form_chain};
pub use feasibility::{
    verify_feasibility, verify_feasibility_with, FeasibilityReport, FeasibleSet, InfeasibleHit, VerifyOptions, Witness,
    MAX_VERIFY_QUBITS,
};
pub use tvf::{tvf_at_most_one, tvf_chain, tvf_flp, tvf_for_problem, tvf_lap, tvf_sum_eq_last, tvf_sum_leq_last};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{penalize, ConstraintKind, LcqboProblem, PenaltyScope, StructuralConstraint};
use crate::statevector::{GateKind, ParamCircuit};

/// A built circuit plus the structural constraints its support is guaranteed to satisfy.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub name: String,
    pub circuit: ParamCircuit,
    pub guarantees: Vec<StructuralConstraint>,
    /// QAOA-style forms start with Hadamards on every qubit.
    pub prepends_superposition: bool,
}

impl Ansatz {
    pub fn stats(&self) -> GateStats {
        gate_stats(&self.circuit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnsatzSpec {
    Chain { n: usize },
    AtMostOne { n: usize },
    SumLeqLast { n: usize },
    SumEqLast { n: usize },
    Flp { n: usize, m: usize },
    Lap { n1: usize, n2: usize },
    /// Composed from the problem's own structural constraints.
    Tailored,
    TwoLocal { depth: usize },
    Qaoa { p: usize, scope: PenaltyScope },
}

impl AnsatzSpec {
    pub fn is_tailored(&self) -> bool {
        !matches!(self, AnsatzSpec::TwoLocal { .. } | AnsatzSpec::Qaoa { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            AnsatzSpec::TwoLocal { .. } => "two-local",
            AnsatzSpec::Qaoa { .. } => "qaoa",
            _ => "tvf",
        }
    }

    /// Builds the circuit for `problem`. `lambda` only matters for QAOA, whose cost layer
    /// comes from the penalized Ising model.
    pub fn build(&self, problem: &LcqboProblem, lambda: f64) -> Result<Ansatz> {
        let n = problem.num_vars();
        let fixed = |name: &str, circuit: ParamCircuit, guarantees: Vec<StructuralConstraint>| {
            if circuit.num_qubits() != n {
                return Err(Error::QubitMismatch { expected: n, got: circuit.num_qubits() });
            }
            Ok(Ansatz { name: name.into(), circuit, guarantees, prepends_superposition: false })
        };
        let whole = |kind: ConstraintKind, n: usize| -> Result<Vec<StructuralConstraint>> {
            Ok(vec![StructuralConstraint::new(kind, (0..n).collect())?])
        };
        match *self {
            AnsatzSpec::Chain { n: k } => {
                let g = if k >= 2 { whole(ConstraintKind::ChainMonotone, k)? } else { Vec::new() };
                fixed("tvf-chain", tvf_chain(k)?, g)
            }
            AnsatzSpec::AtMostOne { n: k } => fixed("tvf-at-most-one", tvf_at_most_one(k)?, whole(ConstraintKind::AtMostOne, k)?),
            AnsatzSpec::SumLeqLast { n: k } => fixed("tvf-sum-leq-last", tvf_sum_leq_last(k)?, whole(ConstraintKind::SumLeqLast, k)?),
            AnsatzSpec::SumEqLast { n: k } => fixed("tvf-sum-eq-last", tvf_sum_eq_last(k)?, whole(ConstraintKind::SumEqLast, k)?),
            AnsatzSpec::Flp { n: f, m } => fixed("tvf-flp", tvf_flp(f, m)?, tvf::flp_guarantees(f, m)),
            AnsatzSpec::Lap { n1, n2 } => fixed("tvf-lap", tvf_lap(n1, n2)?, tvf::lap_guarantees(n1, n2)),
            AnsatzSpec::Tailored => tvf_for_problem(problem),
            AnsatzSpec::TwoLocal { depth } => fixed("two-local", two_local(n, depth)?, Vec::new()),
            AnsatzSpec::Qaoa { p, scope } => {
                let ising = penalize(problem, lambda, scope)?.to_ising();
                Ok(Ansatz { name: "qaoa".into(), circuit: qaoa(&ising, p)?, guarantees: Vec::new(), prepends_superposition: true })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateStats {
    pub su2: usize,
    pub cnot: usize,
    pub params: usize,
    pub cost: usize,
}

impl GateStats {
    pub fn new(su2: usize, cnot: usize, params: usize) -> Self {
        Self { su2, cnot, params, cost: 10 * cnot + su2 }
    }
}

pub fn gate_stats(circuit: &ParamCircuit) -> GateStats {
    let cnot = circuit.gates().iter().filter(|g| matches!(g.kind, GateKind::Cx | GateKind::Cz)).count();
    GateStats::new(circuit.gates().len() - cnot, cnot, circuit.num_params())
}

/// Published gate counts for the standalone forms at size `n`.
pub fn reference_form_stats(kind: ConstraintKind, n: usize) -> Option<GateStats> {
    if n < 2 {
        return None;
    }
    Some(match kind {
        ConstraintKind::ChainMonotone => GateStats::new(2 * n - 1, n - 1, n),
        ConstraintKind::AtMostOne => GateStats::new(2 * n - 1, 2 * (n - 1), n),
        ConstraintKind::SumLeqLast => GateStats::new(2 * n - 1, 4 * n - 6, n),
        ConstraintKind::SumEqLast => GateStats::new(2 * n - 3, 3 * n - 5, n - 1),
        ConstraintKind::VarLeqVar => return None,
    })
}

/// Published comparison rows `(tvf, two-local, qaoa)` for the two benchmark instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    FacilityLocation,
    Assignment,
}

impl Benchmark {
    /// Recognizes the 2x1 facility and 2x2 assignment instances by shape.
    pub fn detect(problem: &LcqboProblem) -> Option<Self> {
        let kinds: Vec<ConstraintKind> = problem.structural().iter().map(|c| c.kind).collect();
        match (problem.num_vars(), kinds.as_slice()) {
            (4, [ConstraintKind::VarLeqVar, ConstraintKind::VarLeqVar]) if problem.equalities().len() == 1 => {
                Some(Benchmark::FacilityLocation)
            }
            (4, [ConstraintKind::AtMostOne, ConstraintKind::AtMostOne]) if problem.equalities().len() == 2 => {
                Some(Benchmark::Assignment)
            }
            _ => None,
        }
    }

    pub fn reference(&self, label: &str) -> Option<GateStats> {
        let two_local = GateStats::new(14, 3, 8);
        match (self, label) {
            (Benchmark::FacilityLocation, "tvf") => Some(GateStats::new(10, 2, 4)),
            (Benchmark::FacilityLocation, "qaoa") => Some(GateStats::new(26, 12, 4)),
            (Benchmark::Assignment, "tvf") => Some(GateStats::new(6, 4, 4)),
            (Benchmark::Assignment, "qaoa") => Some(GateStats::new(24, 8, 4)),
            (_, "two-local") => Some(two_local),
            _ => None,
        }
    }
}
