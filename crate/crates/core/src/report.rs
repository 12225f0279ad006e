//! JSON/CSV reports for single runs and ansatz comparisons.

use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

use crate::ansatz::GateStats;
use crate::error::{Error, Result};
use crate::model::{brute_force_problem, brute_force_qubo, penalize, LcqboProblem, PenaltyScope, ProblemFile};
use crate::statevector::{BitConvention, Histogram};
use crate::vqe::{RestartSummary, TracePoint, VqeConfig, VqeResult};

pub const TOOL: &str = "tvf";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exhaustive optimum of the problem, always included in reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub best_bits: Option<String>,
    pub best_objective: Option<f64>,
    /// Minimum of the fully penalized QUBO, when every constraint has a penalty form.
    pub penalized_minimum: Option<f64>,
    pub penalized_argmin: Option<String>,
}

impl OracleRow {
    pub fn compute(problem: &LcqboProblem, lambda: f64) -> Result<Self> {
        let n = problem.num_vars();
        let exact = brute_force_problem(problem)?;
        let penalized = match penalize(problem, lambda, PenaltyScope::All) {
            Ok(q) => Some(brute_force_qubo(&q)?),
            Err(Error::NoPenaltyForm(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            best_bits: exact.best_index.map(|i| BitConvention::display(i, n)),
            best_objective: exact.best_objective,
            penalized_minimum: penalized.as_ref().map(|o| o.best_value),
            penalized_argmin: penalized.map(|o| BitConvention::display(o.best_index, n)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub ansatz: String,
    pub stats: GateStats,
    /// Published counts for this ansatz on a recognized benchmark instance.
    pub reference_stats: Option<GateStats>,
    pub theta_star: Vec<f64>,
    pub energy: f64,
    pub evaluations: usize,
    pub best_bits: String,
    pub best_objective: f64,
    pub best_feasible: bool,
    pub feasible_fraction: f64,
    pub structural_fraction: f64,
    pub max_structural_violation: f64,
    pub histogram: BTreeMap<String, u64>,
    pub restarts: Vec<RestartSummary>,
    #[serde(skip)]
    pub trace: Vec<TracePoint>,
}

/// Recounts the feasible share of `h` from its display bitstrings.
fn revalidate(problem: &LcqboProblem, h: &BTreeMap<String, u64>, shots: u64) -> Result<f64> {
    let mut good = 0;
    for (bits, count) in h {
        if problem.feasible_index(BitConvention::parse(bits)?) {
            good += count;
        }
    }
    Ok(good as f64 / shots as f64)
}

impl RunRecord {
    pub fn new(problem: &LcqboProblem, r: &VqeResult, reference_stats: Option<GateStats>) -> Result<Self> {
        let histogram = r.histogram.to_display_map();
        let feasible_fraction = revalidate(problem, &histogram, r.histogram.shots)?;
        if (feasible_fraction - r.feasible_fraction).abs() > 1e-12 {
            return Err(Error::InvalidProblem(format!(
                "histogram recount gives feasible fraction {feasible_fraction}, run reported {}",
                r.feasible_fraction
            )));
        }
        Ok(Self {
            ansatz: r.ansatz.clone(),
            stats: r.stats,
            reference_stats,
            theta_star: r.theta_star.clone(),
            energy: r.energy,
            evaluations: r.trace.len(),
            best_bits: r.best_display(),
            best_objective: r.best_objective,
            best_feasible: r.best_feasible,
            feasible_fraction,
            structural_fraction: r.structural_fraction,
            max_structural_violation: r.max_structural_violation,
            histogram,
            restarts: r.restarts.clone(),
            trace: r.trace.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub problem: ProblemFile,
    pub lambda: f64,
    pub config: VqeConfig,
    pub oracle: OracleRow,
    pub runs: Vec<RunRecord>,
}

impl ExperimentReport {
    pub fn new(problem: &LcqboProblem, lambda: f64, config: &VqeConfig, runs: Vec<RunRecord>) -> Result<Self> {
        Ok(Self {
            tool: TOOL,
            version: VERSION,
            problem: ProblemFile::from_problem(problem),
            lambda,
            config: config.clone(),
            oracle: OracleRow::compute(problem, lambda)?,
            runs,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per ansatz plus the oracle row; reference counts sit beside the measured ones.
    pub fn stats_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "ansatz", "su2", "cnot", "params", "cost", "ref_su2", "ref_cnot", "ref_params", "ref_cost", "best_bits",
            "best_objective", "feasible_fraction", "evaluations",
        ])
        .map_err(csv_err)?;
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.runs {
            let s = r.stats;
            let p = r.reference_stats;
            w.write_record([
                r.ansatz.clone(),
                s.su2.to_string(),
                s.cnot.to_string(),
                s.params.to_string(),
                s.cost.to_string(),
                opt(p.map(|g| g.su2)),
                opt(p.map(|g| g.cnot)),
                opt(p.map(|g| g.params)),
                opt(p.map(|g| g.cost)),
                r.best_bits.clone(),
                r.best_objective.to_string(),
                r.feasible_fraction.to_string(),
                r.evaluations.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let o = &self.oracle;
        let mut row = vec!["oracle".to_string()];
        row.extend(std::iter::repeat_n(String::new(), 8));
        row.push(o.best_bits.clone().unwrap_or_default());
        row.push(o.best_objective.map(|v| v.to_string()).unwrap_or_default());
        row.push(if o.best_bits.is_some() { "1".into() } else { String::new() });
        row.push(String::new());
        w.write_record(&row).map_err(csv_err)?;
        into_string(w)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// `iter,energy` rows.
pub fn trace_csv(trace: &[TracePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iter", "energy"]).map_err(csv_err)?;
    for p in trace {
        w.write_record([p.iter.to_string(), p.energy.to_string()]).map_err(csv_err)?;
    }
    into_string(w)
}

/// `{"bitstring": count}` in display order.
pub fn histogram_json(h: &Histogram) -> String {
    serde_json::to_string_pretty(&h.to_display_map()).expect("histogram serializes")
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Every bitstring with raw objective, penalty and feasibility.
pub fn oracle_table_csv(problem: &LcqboProblem, lambda: f64) -> Result<(String, PenaltyScope)> {
    let n = problem.num_vars();
    let exact = brute_force_problem(problem)?;
    let (qubo, scope) = match penalize(problem, lambda, PenaltyScope::All) {
        Ok(q) => (q, PenaltyScope::All),
        Err(Error::NoPenaltyForm(_)) => (penalize(problem, lambda, PenaltyScope::EqualitiesOnly)?, PenaltyScope::EqualitiesOnly),
        Err(e) => return Err(e),
    };
    let sign = problem.sense().min_sign();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bitstring", "objective", "penalty", "penalized", "feasible"]).map_err(csv_err)?;
    for z in 0..1usize << n {
        let penalized = qubo.eval_index(z);
        let objective = exact.objectives[z];
        w.write_record([
            BitConvention::display(z, n),
            objective.to_string(),
            (penalized - sign * objective).to_string(),
            penalized.to_string(),
            exact.feasible[z].to_string(),
        ])
        .map_err(csv_err)?;
    }
    Ok((into_string(w)?, scope))
}
