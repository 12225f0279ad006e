//! Randomized and corner-grid certification that a circuit never leaves a feasible set.

use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ConstraintKind, StructuralConstraint};
use crate::statevector::{seeded_rng, BitConvention, ParamCircuit, StateVector};

pub const MAX_VERIFY_QUBITS: usize = 12;
const MAX_ENUMERATE_QUBITS: usize = 20;
const MAX_CORNER_PARAMS: usize = 14;

/// Intersection of structural constraints over qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    pub num_qubits: usize,
    pub constraints: Vec<StructuralConstraint>,
}

impl FeasibleSet {
    pub fn new(num_qubits: usize, constraints: Vec<StructuralConstraint>) -> Result<Self> {
        if let Some(v) = constraints.iter().flat_map(|c| &c.vars).find(|&&v| v >= num_qubits) {
            return Err(Error::Shape(format!("constraint references qubit {v} outside {num_qubits} qubits")));
        }
        Ok(Self { num_qubits, constraints })
    }

    /// One constraint of `kind` over all `n` qubits in order (none for `n = 1`).
    pub fn for_kind(kind: ConstraintKind, n: usize) -> Result<Self> {
        let constraints = if n >= 2 { vec![StructuralConstraint::new(kind, (0..n).collect())?] } else { Vec::new() };
        Self::new(n, constraints)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.constraints.iter().all(|c| c.satisfied_by_index(index))
    }

    pub fn members(&self) -> Result<Vec<usize>> {
        if self.num_qubits > MAX_ENUMERATE_QUBITS {
            return Err(Error::TooManyVariables { got: self.num_qubits, max: MAX_ENUMERATE_QUBITS });
        }
        Ok((0..1usize << self.num_qubits).filter(|&i| self.contains(i)).collect())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Also evaluate every point of `{0, pi}^params` (skipped above 14 params).
    pub corners: bool,
    pub amplitude_tolerance: f64,
    pub reach_threshold: f64,
}

impl VerifyOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed, corners: true, amplitude_tolerance: 1e-10, reach_threshold: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfeasibleHit {
    pub index: usize,
    pub amplitude: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub index: usize,
    pub probability: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub pass: bool,
    pub points_checked: usize,
    pub worst_infeasible_amplitude: f64,
    pub worst: Option<InfeasibleHit>,
    /// Best observed probability per feasible state, in basis order.
    pub witnesses: Vec<Witness>,
    pub unreachable: Vec<usize>,
}

impl FeasibilityReport {
    pub fn summary(&self, num_qubits: usize) -> String {
        let mut s = format!(
            "{}: {} points, worst infeasible amplitude {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.points_checked,
            self.worst_infeasible_amplitude
        );
        if let Some(w) = self.worst.as_ref().filter(|_| !self.pass) {
            s += &format!(
                "\n  offending state {} (amplitude {:.3e}) at theta {:?}",
                BitConvention::display(w.index, num_qubits),
                w.amplitude,
                w.theta
            );
        }
        for u in &self.unreachable {
            s += &format!("\n  unreachable feasible state {}", BitConvention::display(*u, num_qubits));
        }
        s
    }
}

pub fn verify_feasibility(circuit: &ParamCircuit, feasible: &FeasibleSet, trials: usize, seed: u64) -> Result<FeasibilityReport> {
    verify_feasibility_with(circuit, feasible, VerifyOptions::new(trials, seed))
}

pub fn verify_feasibility_with(circuit: &ParamCircuit, feasible: &FeasibleSet, opts: VerifyOptions) -> Result<FeasibilityReport> {
    let n = circuit.num_qubits();
    if n != feasible.num_qubits {
        return Err(Error::QubitMismatch { expected: feasible.num_qubits, got: n });
    }
    if n > MAX_VERIFY_QUBITS {
        return Err(Error::TooManyVariables { got: n, max: MAX_VERIFY_QUBITS });
    }
    let k = circuit.num_params();
    let mut points: Vec<Vec<f64>> = Vec::new();
    if opts.corners && k <= MAX_CORNER_PARAMS {
        points.extend((0..1usize << k).map(|mask| (0..k).map(|b| if (mask >> b) & 1 == 1 { PI } else { 0.0 }).collect()));
    }
    let mut rng = seeded_rng(opts.seed);
    points.extend((0..opts.trials).map(|_| (0..k).map(|_| rng.gen_range(-PI..=PI)).collect()));

    let mask: Vec<bool> = (0..1usize << n).map(|i| feasible.contains(i)).collect();
    let zero = StateVector::zero(n)?;
    let probs: Vec<Vec<f64>> = points
        .par_iter()
        .map(|theta| Ok(StateVector::run(&circuit.bind(theta)?, &zero)?.probabilities()))
        .collect::<Result<_>>()?;

    let mut worst: Option<InfeasibleHit> = None;
    let mut best: Vec<Option<Witness>> = vec![None; 1 << n];
    for (theta, p) in points.iter().zip(&probs) {
        for (index, &pi) in p.iter().enumerate() {
            if mask[index] {
                if best[index].as_ref().is_none_or(|w| pi > w.probability) {
                    best[index] = Some(Witness { index, probability: pi, theta: theta.clone() });
                }
            } else {
                let amplitude = pi.sqrt();
                if worst.as_ref().is_none_or(|w| amplitude > w.amplitude) {
                    worst = Some(InfeasibleHit { index, amplitude, theta: theta.clone() });
                }
            }
        }
    }
    let worst_infeasible_amplitude = worst.as_ref().map_or(0.0, |w| w.amplitude);
    let witnesses: Vec<Witness> = best.into_iter().flatten().collect();
    let unreachable: Vec<usize> = if points.is_empty() {
        Vec::new()
    } else {
        (0..1usize << n)
            .filter(|&i| mask[i])
            .filter(|&i| witnesses.iter().find(|w| w.index == i).is_none_or(|w| w.probability <= opts.reach_threshold))
            .collect()
    };
    Ok(FeasibilityReport {
        pass: worst_infeasible_amplitude <= opts.amplitude_tolerance && unreachable.is_empty(),
        points_checked: points.len(),
        worst_infeasible_amplitude,
        worst,
        witnesses,
        unreachable,
    })
}
