//! The hybrid loop: prepare, measure, estimate, update.

mod optimizer;

pub use optimizer::{minimize, Minimum, Optimizer};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::ansatz::{gate_stats, Ansatz, AnsatzSpec, GateStats};
use crate::error::{Error, Result};
use crate::model::{penalize, LcqboProblem, PenaltyScope, QuboModel};
use crate::statevector::{seeded_rng, BitConvention, Histogram, ParamCircuit, StateVector, sample_probabilities};

pub const DEFAULT_SHOTS: u64 = 1024;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const DEFAULT_RESTARTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationMode {
    Sampled,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Uniform in `[-pi, pi]` per parameter.
    Random,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub shots: u64,
    pub seed: u64,
    /// Objective evaluations per restart.
    pub max_iters: usize,
    pub mode: ExpectationMode,
    pub optimizer: Optimizer,
    pub init: Init,
    pub restarts: usize,
    /// Penalty weight; `None` uses the problem's own.
    pub lambda: Option<f64>,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            shots: DEFAULT_SHOTS,
            seed: 0,
            max_iters: DEFAULT_MAX_ITERS,
            mode: ExpectationMode::Sampled,
            optimizer: Optimizer::default(),
            init: Init::Random,
            restarts: DEFAULT_RESTARTS,
            lambda: None,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::BadLambda(l));
            }
        }
        self.optimizer.validate()
    }
}

/// SplitMix64 step; derives independent child seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn probabilities(circuit: &ParamCircuit, theta: &[f64]) -> Result<Vec<f64>> {
    let bound = circuit.bind(theta)?;
    Ok(StateVector::run(&bound, &StateVector::zero(circuit.num_qubits())?)?.probabilities())
}

/// `<H>` of the diagonal QUBO Hamiltonian at `theta`.
pub fn expectation(
    circuit: &ParamCircuit,
    theta: &[f64],
    qubo: &QuboModel,
    mode: ExpectationMode,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    if qubo.num_vars != circuit.num_qubits() {
        return Err(Error::QubitMismatch { expected: circuit.num_qubits(), got: qubo.num_vars });
    }
    Estimator::new(circuit, qubo.values(), mode, shots, seed)?.energy(theta).map(|e| e.energy)
}

struct Estimate {
    energy: f64,
    probs: Vec<f64>,
    histogram: Option<Histogram>,
}

/// Energy evaluator with the QUBO table precomputed. Sampled mode reuses the same seed for
/// every evaluation so the estimated landscape is a deterministic function of theta.
struct Estimator<'a> {
    circuit: &'a ParamCircuit,
    values: Vec<f64>,
    mode: ExpectationMode,
    shots: u64,
    seed: u64,
}

impl<'a> Estimator<'a> {
    fn new(circuit: &'a ParamCircuit, values: Vec<f64>, mode: ExpectationMode, shots: u64, seed: u64) -> Result<Self> {
        if mode == ExpectationMode::Sampled && shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(Self { circuit, values, mode, shots, seed })
    }

    fn energy(&self, theta: &[f64]) -> Result<Estimate> {
        let probs = probabilities(self.circuit, theta)?;
        Ok(match self.mode {
            ExpectationMode::Exact => {
                Estimate { energy: probs.iter().zip(&self.values).map(|(p, v)| p * v).sum(), probs, histogram: None }
            }
            ExpectationMode::Sampled => {
                let h = sample_probabilities(&probs, self.shots, &mut seeded_rng(self.seed))?;
                let total: f64 = h.counts.iter().map(|(&z, &c)| c as f64 * self.values[z]).sum();
                Estimate { energy: total / self.shots as f64, probs, histogram: Some(h) }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iter: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub seed: u64,
    pub theta0: Vec<f64>,
    pub final_energy: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub ansatz: String,
    pub stats: GateStats,
    pub lambda: f64,
    pub theta_star: Vec<f64>,
    /// Energy estimate at `theta_star`.
    pub energy: f64,
    /// Every evaluation of the winning restart.
    pub trace: Vec<TracePoint>,
    pub histogram: Histogram,
    pub best_bits: Vec<u8>,
    pub best_objective: f64,
    pub best_feasible: bool,
    /// Share of final shots satisfying every constraint.
    pub feasible_fraction: f64,
    /// Share of final shots satisfying the structural constraints.
    pub structural_fraction: f64,
    /// Largest structurally infeasible mass seen at any evaluation of any restart
    /// (sampled share or exact probability, per mode).
    pub max_structural_violation: f64,
    pub restarts: Vec<RestartSummary>,
}

impl VqeResult {
    pub fn best_display(&self) -> String {
        self.best_bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }
}

/// Fails unless the ansatz guarantees carve out exactly the problem's structural feasible set.
fn check_coverage(problem: &LcqboProblem, ansatz: &Ansatz) -> Result<()> {
    let n = problem.num_vars();
    let describe = |c: &crate::model::StructuralConstraint| {
        let names: Vec<&str> = c.vars.iter().map(|&v| problem.variables()[v].as_str()).collect();
        format!("{}({})", c.kind.name(), names.join(", "))
    };
    if n > 20 {
        let mut want = problem.structural().to_vec();
        let mut have = ansatz.guarantees.clone();
        want.sort_by(|a, b| (a.kind, &a.vars).cmp(&(b.kind, &b.vars)));
        have.sort_by(|a, b| (a.kind, &a.vars).cmp(&(b.kind, &b.vars)));
        if want != have {
            return Err(Error::NotRepresentable(format!("{} does not cover the problem's structural constraints", ansatz.name)));
        }
        return Ok(());
    }
    for index in 0..1usize << n {
        let allowed = ansatz.guarantees.iter().all(|c| c.satisfied_by_index(index));
        if allowed && !problem.structurally_feasible_index(index) {
            let broken = problem.structural().iter().find(|c| !c.satisfied_by_index(index)).expect("some constraint fails");
            return Err(Error::NotRepresentable(format!(
                "{} does not enforce {}: state {} is reachable",
                ansatz.name,
                describe(broken),
                BitConvention::display(index, n)
            )));
        }
        if !allowed && problem.structurally_feasible_index(index) {
            return Err(Error::NotRepresentable(format!(
                "{} excludes feasible state {}",
                ansatz.name,
                BitConvention::display(index, n)
            )));
        }
    }
    Ok(())
}

struct RestartRun {
    summary: RestartSummary,
    minimum: Minimum,
    max_structural_violation: f64,
}

/// Runs the full VQE. Tailored forms must cover every structural constraint and only the
/// equalities are penalized; baselines penalize everything.
pub fn run_vqe(problem: &LcqboProblem, spec: &AnsatzSpec, config: &VqeConfig) -> Result<VqeResult> {
    config.validate()?;
    let n = problem.num_vars();
    let lambda = config.lambda.unwrap_or(problem.lambda());
    let ansatz = spec.build(problem, lambda)?;
    if ansatz.circuit.num_qubits() != n {
        return Err(Error::QubitMismatch { expected: n, got: ansatz.circuit.num_qubits() });
    }
    let scope = if spec.is_tailored() {
        check_coverage(problem, &ansatz)?;
        PenaltyScope::EqualitiesOnly
    } else {
        PenaltyScope::All
    };
    let qubo = penalize(problem, lambda, scope)?;
    let values = qubo.values();
    let structural_ok: Vec<bool> = (0..1usize << n).map(|i| problem.structurally_feasible_index(i)).collect();
    let k = ansatz.circuit.num_params();

    let starts: Vec<(usize, u64, Vec<f64>)> = match &config.init {
        Init::Explicit(theta) => {
            if theta.len() != k {
                return Err(Error::ParamArity { expected: k, got: theta.len() });
            }
            vec![(0, config.seed, theta.clone())]
        }
        Init::Random => (0..config.restarts)
            .map(|r| {
                let seed = derive_seed(config.seed, r as u64);
                let mut rng = seeded_rng(seed);
                (r, seed, (0..k).map(|_| rng.gen_range(-PI..=PI)).collect())
            })
            .collect(),
    };

    let runs: Vec<RestartRun> = starts
        .into_par_iter()
        .map(|(index, seed, theta0)| {
            let est = Estimator::new(&ansatz.circuit, values.clone(), config.mode, config.shots, seed)?;
            let mut worst_violation: f64 = 0.0;
            let mut f = |theta: &[f64]| -> Result<f64> {
                let e = est.energy(theta)?;
                let bad = match &e.histogram {
                    Some(h) => h.counts.iter().filter(|(&z, _)| !structural_ok[z]).map(|(_, &c)| c as f64).sum::<f64>() / h.shots as f64,
                    None => e.probs.iter().zip(&structural_ok).filter(|(_, ok)| !**ok).map(|(p, _)| p).sum(),
                };
                worst_violation = worst_violation.max(bad);
                Ok(e.energy)
            };
            let minimum = if k == 0 {
                Minimum { x: Vec::new(), value: f(&[])?, trace: Vec::new(), converged: true }
            } else {
                minimize(&mut f, &theta0, config.optimizer, config.max_iters)?
            };
            let mut minimum = minimum;
            if minimum.trace.is_empty() {
                minimum.trace.push(minimum.value);
            }
            Ok(RestartRun {
                summary: RestartSummary {
                    index,
                    seed,
                    theta0,
                    final_energy: minimum.value,
                    evaluations: minimum.trace.len(),
                    converged: minimum.converged,
                },
                minimum,
                max_structural_violation: worst_violation,
            })
        })
        .collect::<Result<_>>()?;

    let winner = runs
        .iter()
        .min_by(|a, b| a.minimum.value.total_cmp(&b.minimum.value).then(a.summary.index.cmp(&b.summary.index)))
        .expect("at least one restart");
    let theta_star = winner.minimum.x.clone();
    let final_seed = derive_seed(config.seed, u64::MAX);
    let probs = probabilities(&ansatz.circuit, &theta_star)?;
    let histogram = sample_probabilities(&probs, config.shots, &mut seeded_rng(final_seed))?;

    let shots = histogram.shots as f64;
    let feasible_fraction = histogram.counts.iter().filter(|(&z, _)| problem.feasible_index(z)).map(|(_, &c)| c as f64).sum::<f64>() / shots;
    let structural_fraction = histogram.counts.iter().filter(|(&z, _)| structural_ok[z]).map(|(_, &c)| c as f64).sum::<f64>() / shots;

    let sign = problem.sense().min_sign();
    let feasible_best = histogram
        .counts
        .keys()
        .copied()
        .filter(|&z| problem.feasible_index(z))
        .min_by(|&a, &b| (sign * problem.objective_at_index(a)).total_cmp(&(sign * problem.objective_at_index(b))).then(a.cmp(&b)));
    let (best, best_feasible) = match feasible_best {
        Some(z) => (z, true),
        None => {
            let z = histogram.counts.keys().copied().min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b))).expect("shots >= 1");
            (z, false)
        }
    };

    Ok(VqeResult {
        ansatz: ansatz.name.clone(),
        stats: gate_stats(&ansatz.circuit),
        lambda,
        energy: winner.minimum.value,
        trace: winner.minimum.trace.iter().enumerate().map(|(iter, &energy)| TracePoint { iter, energy }).collect(),
        theta_star,
        best_bits: BitConvention::bits(best, n),
        best_objective: problem.objective_at_index(best),
        best_feasible,
        feasible_fraction,
        structural_fraction,
        max_structural_violation: runs.iter().map(|r| r.max_structural_violation).fold(0.0, f64::max),
        restarts: runs.into_iter().map(|r| r.summary).collect(),
        histogram,
    })
}
